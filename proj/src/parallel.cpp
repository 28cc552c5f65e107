#include "gkz/parallel.hpp"

#include <cstdlib>
#include <string>

#include <omp.h>

#include "gkz/errors.hpp"

namespace gkz {

int max_threads() { return omp_get_max_threads(); }

void set_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

void configure_threads_from_env() {
  const char* raw = std::getenv("GKZ_NUM_THREADS");
  if (raw == nullptr || *raw == '\0') return;
  try {
    set_threads(std::stoi(raw));
  } catch (const std::exception&) {
    // Unparsable values fall back to the OpenMP default.
  }
}

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::LatticeNotSaturated: return "LatticeNotSaturated";
    case ErrorCode::SingularModulus: return "SingularModulus";
    case ErrorCode::SingularSimplex: return "SingularSimplex";
    case ErrorCode::IncompleteRepresentatives: return "IncompleteRepresentatives";
    case ErrorCode::RepresentativesNotFound: return "RepresentativesNotFound";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::DegenerateWeights: return "DegenerateWeights";
    case ErrorCode::BranchCut: return "BranchCut";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::PoleHit: return "PoleHit";
    case ErrorCode::TailNotConverged: return "TailNotConverged";
    case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorCode::OrderTooHigh: return "OrderTooHigh";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace gkz
