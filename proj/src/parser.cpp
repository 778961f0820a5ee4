#include "lq/parser.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace lq {

std::string kind_name(Diagnostic::Kind k) {
  switch (k) {
    case Diagnostic::Kind::UnboundVariable: return "UnboundVariable";
    case Diagnostic::Kind::LinearityMismatch: return "LinearityMismatch";
    case Diagnostic::Kind::UnjoinableUsage: return "UnjoinableUsage";
    case Diagnostic::Kind::ArityMismatch: return "ArityMismatch";
    case Diagnostic::Kind::TypeMismatch: return "TypeMismatch";
    case Diagnostic::Kind::FreshnessViolation: return "FreshnessViolation";
    case Diagnostic::Kind::MalformedDecl: return "MalformedDecl";
    case Diagnostic::Kind::SyntaxError: return "SyntaxError";
  }
  return "?";
}

std::string to_string(const Diagnostic& d) {
  return std::to_string(d.loc.line) + ":" + std::to_string(d.loc.col) + ": " + kind_name(d.kind) + ": " +
         d.message;
}

namespace {

enum class Tok { Ident, Int, Sym, End };

struct Token {
  Tok kind;
  std::string text;
  std::int64_t value = 0;
  SrcLoc loc;
};

struct ParseFailure {
  Diagnostic diag;
};

[[noreturn]] void fail(SrcLoc loc, const std::string& msg, Diagnostic::Kind k = Diagnostic::Kind::SyntaxError) {
  throw ParseFailure{Diagnostic{k, loc, msg}};
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)); }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    SrcLoc loc{line, col};
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      out.push_back(Token{Tok::Ident, src.substr(i, j - i), 0, loc});
      advance(j - i);
      continue;
    }
    bool neg = c == '-' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1]));
    if (std::isdigit(static_cast<unsigned char>(c)) || neg) {
      std::size_t j = i + (neg ? 1 : 0);
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      auto text = src.substr(i, j - i);
      std::int64_t v = 0;
      try {
        v = std::stoll(text);
      } catch (const std::exception&) {
        fail(loc, "integer literal out of range: " + text);
      }
      out.push_back(Token{Tok::Int, text, v, loc});
      advance(j - i);
      continue;
    }
    static const char* multi[] = {"/\\", "->", "-o"};
    bool matched = false;
    for (const char* m : multi) {
      std::string s(m);
      if (src.compare(i, s.size(), s) == 0) {
        if (s == "-o" && i + 2 < src.size() && ident_char(src[i + 2])) continue;
        out.push_back(Token{Tok::Sym, s, 0, loc});
        advance(s.size());
        matched = true;
        break;
      }
    }
    if (matched) continue;
    static const std::string singles = "\\.:,;(){}[]@=+*_";
    if (singles.find(c) != std::string::npos) {
      out.push_back(Token{Tok::Sym, std::string(1, c), 0, loc});
      advance(1);
      continue;
    }
    fail(loc, std::string("unexpected character '") + c + "'");
  }
  out.push_back(Token{Tok::End, "", 0, {line, col}});
  return out;
}

bool is_upper(const std::string& s) { return !s.empty() && std::isupper(static_cast<unsigned char>(s[0])); }

const std::set<std::string>& keywords() {
  static const std::set<std::string> k = {"data", "where", "def",   "main",   "case",  "of", "let",
                                          "in",   "forall", "Int",  "MArray", "Array", "w"};
  return k;
}

class Parser {
 public:
  Parser(std::vector<Token> toks, const std::vector<DataDecl>& known) : toks_(std::move(toks)) {
    for (const auto& d : known) register_decl(d);
  }

  SourceFile file() {
    std::vector<DataDecl> decls;
    std::vector<Def> defs;
    std::optional<Term> main;
    while (!at_end()) {
      if (is_ident("data")) {
        decls.push_back(decl());
      } else if (is_ident("def")) {
        defs.push_back(def());
      } else if (is_ident("main")) {
        auto loc = next().loc;
        if (main) fail(loc, "duplicate main");
        expect("=");
        main = term();
      } else {
        fail(peek().loc, "expected 'data', 'def' or 'main', found '" + peek().text + "'");
      }
    }
    if (!main) fail(peek().loc, "missing main");
    return SourceFile{std::move(decls), std::move(defs), *main};
  }

  Term whole_term() {
    auto t = term();
    if (!at_end()) fail(peek().loc, "unexpected '" + peek().text + "'");
    return t;
  }

  Type whole_type() {
    auto t = type();
    if (!at_end()) fail(peek().loc, "unexpected '" + peek().text + "'");
    return t;
  }

  MultExpr whole_mult() {
    auto m = mult();
    if (!at_end()) fail(peek().loc, "unexpected '" + peek().text + "'");
    return m;
  }

 private:
  struct Arity {
    std::size_t mults = 0;
    std::size_t types = 0;
  };

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::map<std::string, Arity> types_;
  std::map<std::string, std::string> cons_;  // constructor -> datatype

  void register_decl(const DataDecl& d) {
    types_[d.name] = Arity{d.mult_params.size(), d.type_params.size()};
    for (const auto& c : d.constructors) cons_[c.name] = d.name;
  }

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool at_end() const { return peek().kind == Tok::End; }
  bool is_sym(const char* s, std::size_t k = 0) const { return peek(k).kind == Tok::Sym && peek(k).text == s; }
  bool is_ident(const char* s) const { return peek().kind == Tok::Ident && peek().text == s; }

  void expect(const char* s) {
    if (!is_sym(s)) fail(peek().loc, std::string("expected '") + s + "', found '" + describe(peek()) + "'");
    next();
  }
  void expect_kw(const char* s) {
    if (!is_ident(s)) fail(peek().loc, std::string("expected '") + s + "', found '" + describe(peek()) + "'");
    next();
  }
  static std::string describe(const Token& t) { return t.kind == Tok::End ? "end of input" : t.text; }

  std::string ident(const char* what) {
    const Token& t = peek();
    if (t.kind != Tok::Ident || keywords().count(t.text))
      fail(t.loc, std::string("expected ") + what + ", found '" + describe(t) + "'");
    next();
    return t.text;
  }

  std::string lower_ident(const char* what) {
    auto loc = peek().loc;
    auto s = ident(what);
    if (is_upper(s)) fail(loc, std::string("expected ") + what + " (lowercase), found '" + s + "'");
    return s;
  }

  // -- multiplicities -------------------------------------------------------

  MultExpr mult() {
    auto lhs = mult_product();
    while (is_sym("+")) {
      next();
      lhs = MultExpr::add(lhs, mult_product());
    }
    return lhs;
  }

  MultExpr mult_product() {
    auto lhs = mult_atom();
    while (is_sym("*")) {
      next();
      lhs = MultExpr::mul(lhs, mult_atom());
    }
    return lhs;
  }

  MultExpr mult_atom() {
    const Token& t = peek();
    if (t.kind == Tok::Int) {
      if (t.value != 1) fail(t.loc, "multiplicity literal must be 1 or w");
      next();
      return MultExpr::one();
    }
    if (is_ident("w")) {
      next();
      return MultExpr::omega();
    }
    if (is_sym("(")) {
      next();
      auto m = mult();
      expect(")");
      return m;
    }
    return MultExpr::var(lower_ident("multiplicity"));
  }

  MultExpr bracket_mult() {
    expect("[");
    auto m = mult();
    expect("]");
    return m;
  }

  bool starts_mult_atom() const {
    const Token& t = peek();
    if (t.kind == Tok::Int) return true;
    if (is_sym("(")) return true;
    return t.kind == Tok::Ident && (t.text == "w" || (!keywords().count(t.text) && !is_upper(t.text)));
  }

  // -- types ----------------------------------------------------------------

  Type type() {
    if (is_ident("forall")) {
      next();
      auto p = lower_ident("multiplicity variable");
      expect(".");
      return Type::forall(p, type());
    }
    auto lhs = app_type();
    if (is_sym("->")) {
      next();
      MultExpr m = is_sym("[") ? bracket_mult() : MultExpr::omega();
      return Type::arrow(lhs, m, type());
    }
    if (is_sym("-o")) {
      next();
      return Type::arrow(lhs, MultExpr::one(), type());
    }
    return lhs;
  }

  Type app_type() {
    if (is_ident("MArray")) {
      next();
      return Type::marray(atom_type());
    }
    if (is_ident("Array")) {
      next();
      return Type::array(atom_type());
    }
    const Token& t = peek();
    if (t.kind == Tok::Ident && is_upper(t.text) && !keywords().count(t.text)) {
      auto it = types_.find(t.text);
      if (it == types_.end()) fail(t.loc, "unknown datatype '" + t.text + "'");
      next();
      std::vector<MultExpr> ms;
      for (std::size_t i = 0; i < it->second.mults; ++i) {
        if (!starts_mult_atom()) fail(peek().loc, "datatype '" + t.text + "' expects " +
                                                      std::to_string(it->second.mults) + " multiplicity arguments");
        ms.push_back(mult_atom());
      }
      std::vector<Type> ts;
      for (std::size_t i = 0; i < it->second.types; ++i) ts.push_back(atom_type());
      return Type::data(t.text, std::move(ms), std::move(ts));
    }
    return atom_type();
  }

  Type atom_type() {
    const Token& t = peek();
    if (is_ident("Int")) {
      next();
      return Type::int_();
    }
    if (is_sym("_")) {
      next();
      return Type::hole();
    }
    if (is_sym("(")) {
      next();
      auto ty = type();
      expect(")");
      return ty;
    }
    if (t.kind == Tok::Ident && is_upper(t.text) && !keywords().count(t.text)) {
      auto it = types_.find(t.text);
      if (it == types_.end()) fail(t.loc, "unknown datatype '" + t.text + "'");
      if (it->second.mults + it->second.types > 0)
        fail(t.loc, "datatype '" + t.text + "' needs arguments; parenthesize it");
      next();
      return Type::data(t.text, {}, {});
    }
    return Type::var(lower_ident("type"));
  }

  // -- terms ----------------------------------------------------------------

  Term term() {
    auto loc = peek().loc;
    if (is_sym("\\")) {
      next();
      auto m = bracket_mult();
      auto x = lower_ident("variable");
      expect(":");
      auto ty = type();
      expect(".");
      return Term::lam(m, x, ty, term(), loc);
    }
    if (is_sym("/\\")) {
      next();
      auto p = lower_ident("multiplicity variable");
      expect(".");
      return Term::mult_lam(p, term(), loc);
    }
    if (is_ident("case")) {
      next();
      auto m = bracket_mult();
      auto scrut = term();
      expect_kw("of");
      expect("{");
      std::vector<Branch> branches;
      while (!is_sym("}")) {
        auto cloc = peek().loc;
        auto con = ident("constructor");
        if (!is_upper(con)) fail(cloc, "expected constructor, found '" + con + "'");
        std::vector<std::string> binders;
        while (!is_sym("->")) binders.push_back(lower_ident("pattern variable"));
        expect("->");
        branches.push_back(Branch{con, std::move(binders), term()});
        if (!is_sym(";")) break;
        next();
      }
      expect("}");
      if (branches.empty()) fail(loc, "case needs at least one branch");
      return Term::case_(m, scrut, std::move(branches), loc);
    }
    if (is_ident("let")) {
      next();
      auto m = bracket_mult();
      std::vector<LetBinding> bindings;
      bool overridden = false;
      do {
        if (!bindings.empty()) next();
        auto x = lower_ident("variable");
        expect(":");
        MultExpr bm = m;
        if (is_sym("[")) {
          bm = bracket_mult();
          overridden = true;
        }
        auto ty = type();
        expect("=");
        bindings.push_back(LetBinding{x, bm, ty, term()});
      } while (is_sym(","));
      expect_kw("in");
      bool recursive = !overridden && m.kind() == MultExpr::Kind::Omega;
      return Term::let(std::move(bindings), recursive, term(), loc);
    }
    return application();
  }

  bool starts_atom() const {
    const Token& t = peek();
    if (t.kind == Tok::Int) return true;
    if (is_sym("(")) return true;
    return t.kind == Tok::Ident && !keywords().count(t.text);
  }

  Term application() {
    auto loc = peek().loc;
    const Token& t = peek();
    if (t.kind == Tok::Ident && is_upper(t.text) && !keywords().count(t.text)) {
      auto con = constructor_head();
      std::vector<Term> args;
      while (starts_atom()) args.push_back(atom());
      return Term::con(con.name(), con.type_inst(), con.mult_inst(), std::move(args), loc);
    }
    auto head = atom();
    for (;;) {
      if (is_sym("@")) {
        auto aloc = next().loc;
        head = Term::mult_app(head, bracket_mult(), aloc);
      } else if (starts_atom()) {
        auto aloc = peek().loc;
        head = Term::app(head, atom(), aloc);
      } else {
        return head;
      }
    }
  }

  // Constructor name plus its instantiation groups, without arguments.
  Term constructor_head() {
    const Token& t = peek();
    auto loc = t.loc;
    auto it = cons_.find(t.text);
    if (it == cons_.end()) fail(loc, "unknown constructor '" + t.text + "'");
    next();
    const Arity& ar = types_.at(it->second);
    std::vector<Type> ts;
    std::vector<MultExpr> ms;
    if (ar.types > 0) {
      expect("@");
      expect("[");
      ts.push_back(type());
      while (is_sym(",")) {
        next();
        ts.push_back(type());
      }
      expect("]");
    }
    if (ar.mults > 0) {
      expect("@");
      expect("[");
      ms.push_back(mult());
      while (is_sym(",")) {
        next();
        ms.push_back(mult());
      }
      expect("]");
    }
    return Term::con(t.text, std::move(ts), std::move(ms), {}, loc);
  }

  Term atom() {
    const Token& t = peek();
    auto loc = t.loc;
    if (t.kind == Tok::Int) {
      next();
      return Term::int_lit(t.value, loc);
    }
    if (is_sym("(")) {
      next();
      auto inner = term();
      expect(")");
      return inner;
    }
    if (t.kind == Tok::Ident && is_upper(t.text) && !keywords().count(t.text)) return constructor_head();
    if (t.kind == Tok::Ident) {
      if (auto op = prim_from_name(t.text)) {
        next();
        expect("(");
        std::vector<Term> args;
        if (!is_sym(")")) {
          args.push_back(term());
          while (is_sym(",")) {
            next();
            args.push_back(term());
          }
        }
        expect(")");
        return Term::prim(*op, std::move(args), loc);
      }
      return Term::var(lower_ident("variable"), loc);
    }
    fail(loc, "expected a term, found '" + describe(t) + "'");
  }

  // -- declarations ---------------------------------------------------------

  DataDecl decl() {
    auto loc = next().loc;  // data
    DataDecl d;
    d.loc = loc;
    auto nloc = peek().loc;
    d.name = ident("datatype name");
    if (!is_upper(d.name)) fail(nloc, "datatype names start with an uppercase letter");
    if (is_sym("[")) {
      next();
      while (!is_sym("]")) d.mult_params.push_back(lower_ident("multiplicity parameter"));
      next();
    }
    while (!is_ident("where")) d.type_params.push_back(lower_ident("type parameter"));
    next();
    register_decl(d);
    expect("{");
    while (!is_sym("}")) {
      ConstructorDecl c;
      c.loc = peek().loc;
      c.name = ident("constructor");
      if (!is_upper(c.name)) fail(c.loc, "constructor names start with an uppercase letter");
      expect(":");
      Type sig = type();
      while (sig.kind() == Type::Kind::Arrow) {
        c.fields.emplace_back(sig.dom(), sig.mult());
        sig = sig.cod();
      }
      bool ok = sig.kind() == Type::Kind::Data && sig.name() == d.name &&
                sig.mult_args().size() == d.mult_params.size() && sig.type_args().size() == d.type_params.size();
      for (std::size_t i = 0; ok && i < d.mult_params.size(); ++i) {
        const auto& m = sig.mult_args()[i];
        ok = m.kind() == MultExpr::Kind::Var && m.name() == d.mult_params[i];
      }
      for (std::size_t i = 0; ok && i < d.type_params.size(); ++i) {
        const auto& a = sig.type_args()[i];
        ok = a.kind() == Type::Kind::TypeVar && a.name() == d.type_params[i];
      }
      if (!ok)
        fail(c.loc, "constructor '" + c.name + "' must return '" + d.name + "' applied to its parameters",
             Diagnostic::Kind::MalformedDecl);
      d.constructors.push_back(std::move(c));
      if (!is_sym(";")) break;
      next();
    }
    expect("}");
    register_decl(d);
    return d;
  }

  Def def() {
    auto loc = next().loc;  // def
    auto name = lower_ident("definition name");
    expect(":");
    auto ty = type();
    expect("=");
    auto mloc = peek().loc;
    auto m = bracket_mult();
    if (m.kind() != MultExpr::Kind::One && m.kind() != MultExpr::Kind::Omega)
      fail(mloc, "definitions are bound at 1 or w");
    return Def{name, ty, m, term(), loc};
  }
};

template <typename T, typename F>
Result<T, Diagnostic> run_parser(const std::string& text, const std::vector<DataDecl>& known, F&& f) {
  try {
    Parser p(lex(text), known);
    return f(p);
  } catch (const ParseFailure& e) {
    return e.diag;
  }
}

}  // namespace

Result<SourceFile, Diagnostic> parse_source(const std::string& text, const std::vector<DataDecl>& known) {
  return run_parser<SourceFile>(text, known, [](Parser& p) { return p.file(); });
}

Result<Term, Diagnostic> parse_term(const std::string& text, const std::vector<DataDecl>& known) {
  return run_parser<Term>(text, known, [](Parser& p) { return p.whole_term(); });
}

Result<Type, Diagnostic> parse_type(const std::string& text, const std::vector<DataDecl>& known) {
  return run_parser<Type>(text, known, [](Parser& p) { return p.whole_type(); });
}

Result<MultExpr, Diagnostic> parse_mult(const std::string& text) {
  return run_parser<MultExpr>(text, {}, [](Parser& p) { return p.whole_mult(); });
}

std::string prelude_text() {
  if (const char* path = std::getenv("LLQ_PRELUDE")) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  return builtin_prelude_text();
}

Result<std::vector<DataDecl>, Diagnostic> load_prelude() {
  if (const char* path = std::getenv("LLQ_PRELUDE")) {
    std::ifstream in(path);
    if (!in) return Diagnostic{Diagnostic::Kind::SyntaxError, {}, std::string("cannot read prelude ") + path};
  }
  auto parsed = parse_source(prelude_text() + "\nmain = 0\n");
  if (!parsed) return parsed.error();
  return parsed->decls;
}

}  // namespace lq
