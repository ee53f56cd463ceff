#include "maslov/errors.hpp"

namespace maslov {

const char* to_string(NumericalErrorKind kind) noexcept {
  switch (kind) {
    case NumericalErrorKind::Ambiguity: return "numerical ambiguity";
    case NumericalErrorKind::WrongCorank: return "wrong corank";
    case NumericalErrorKind::NoConvergence: return "no convergence";
    case NumericalErrorKind::CurveHitsSingularSet: return "curve hits singular set";
    case NumericalErrorKind::UnresolvablePhase: return "unresolvable phase";
    case NumericalErrorKind::Inconsistency: return "inconsistency";
    case NumericalErrorKind::Degenerate: return "degenerate singularity";
    case NumericalErrorKind::NonTransverse: return "non-transverse";
    case NumericalErrorKind::IntegrationQuality: return "integration quality";
    case NumericalErrorKind::CompactnessViolation: return "compactness violation";
  }
  return "numerical error";
}

}  // namespace maslov
