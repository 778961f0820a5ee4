#include "lq/outcome.hpp"

#include <pthread.h>

#include <exception>
#include <stdexcept>

namespace lq {

std::string reason_name(BlockReason r) {
  switch (r) {
    case BlockReason::MissingLinearBinding: return "MissingLinearBinding";
    case BlockReason::TypestateViolation: return "TypestateViolation";
    case BlockReason::MissingBranch: return "MissingBranch";
    case BlockReason::PrimitiveMisuse: return "PrimitiveMisuse";
  }
  return "?";
}

bool GroundValue::is_ground() const {
  if (kind == Kind::Opaque) return false;
  for (const auto& f : fields)
    if (!f.is_ground()) return false;
  return true;
}

bool GroundValue::operator==(const GroundValue& o) const {
  return kind == o.kind && value == o.value && name == o.name && fields == o.fields;
}

namespace {

void render(std::string& out, const GroundValue& v, bool nested) {
  switch (v.kind) {
    case GroundValue::Kind::Int:
      out += std::to_string(v.value);
      return;
    case GroundValue::Kind::Opaque:
      out += v.name;
      return;
    case GroundValue::Kind::Con: {
      bool parens = nested && !v.fields.empty();
      if (parens) out += '(';
      out += v.name;
      for (const auto& f : v.fields) {
        out += ' ';
        render(out, f, true);
      }
      if (parens) out += ')';
      return;
    }
  }
}

}  // namespace

std::string to_string(const GroundValue& v) {
  std::string out;
  render(out, v, false);
  return out;
}

std::string outcome_kind_name(Outcome::Kind k) {
  switch (k) {
    case Outcome::Kind::Value: return "value";
    case Outcome::Kind::Blocked: return "blocked";
    case Outcome::Kind::OutOfFuel: return "fuel";
    case Outcome::Kind::Blackhole: return "blackhole";
  }
  return "?";
}

std::string describe(const Outcome& o) {
  switch (o.kind) {
    case Outcome::Kind::Value:
      if (o.ground) return to_string(*o.ground);
      return "<value>";
    case Outcome::Kind::Blocked: {
      std::string s = "blocked: " + reason_name(o.reason) + " in rule '" + o.rule + "'";
      if (!o.location.empty()) s += " at " + o.location;
      if (!o.message.empty()) s += " (" + o.message + ")";
      return s;
    }
    case Outcome::Kind::OutOfFuel:
      return "out of fuel after " + std::to_string(o.steps) + " steps";
    case Outcome::Kind::Blackhole:
      return "blackhole" + (o.location.empty() ? std::string() : " at " + o.location);
  }
  return "?";
}

namespace {

struct Job {
  const std::function<void()>* fn;
  std::exception_ptr error;
};

void* trampoline(void* arg) {
  auto* job = static_cast<Job*>(arg);
  try {
    (*job->fn)();
  } catch (...) {
    job->error = std::current_exception();
  }
  return nullptr;
}

}  // namespace

void run_with_large_stack(const std::function<void()>& fn) {
  constexpr std::size_t kStack = std::size_t{1} << 30;
  Job job{&fn, nullptr};
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, kStack);
  pthread_t thread;
  if (pthread_create(&thread, &attr, trampoline, &job) != 0) {
    pthread_attr_destroy(&attr);
    fn();
    return;
  }
  pthread_join(thread, nullptr);
  pthread_attr_destroy(&attr);
  if (job.error) std::rethrow_exception(job.error);
}

}  // namespace lq
