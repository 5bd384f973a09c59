#pragma once
#include <stdexcept>
#include <string>

namespace driftlab {

struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};
struct ConvergenceError : std::runtime_error {
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};
struct SingularError : std::runtime_error {
  explicit SingularError(const std::string& what) : std::runtime_error(what) {}
};
struct DivergenceError : std::runtime_error {
  explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};
struct StiffnessError : std::runtime_error {
  explicit StiffnessError(const std::string& what) : std::runtime_error(what) {}
};
struct EstimatorError : std::runtime_error {
  explicit EstimatorError(const std::string& what) : std::runtime_error(what) {}
};
struct GridError : std::runtime_error {
  explicit GridError(const std::string& what) : std::runtime_error(what) {}
};
struct BranchEndError : std::runtime_error {
  explicit BranchEndError(const std::string& what) : std::runtime_error(what) {}
};
struct InvalidSaddleError : std::runtime_error {
  explicit InvalidSaddleError(const std::string& what) : std::runtime_error(what) {}
};
struct QuadratureError : std::runtime_error {
  explicit QuadratureError(const std::string& what) : std::runtime_error(what) {}
};
struct EscapeError : std::runtime_error {
  explicit EscapeError(const std::string& what) : std::runtime_error(what) {}
};
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace driftlab
