#include "bayesbench/model_input.hpp"

#include <array>
#include <cmath>
#include <map>

#include "bayesbench/error.hpp"

namespace bayesbench {
namespace {

constexpr std::array<std::pair<ModelKind, const char*>, 6> kNames{{
    {ModelKind::Binomial, "binomial"},
    {ModelKind::RelativeImprovement, "relative_improvement"},
    {ModelKind::BradleyTerry, "bradley_terry"},
    {ModelKind::Davidson, "davidson"},
    {ModelKind::Cox, "cox"},
    {ModelKind::StudentT, "student_t"},
}};

void check_size(const char* name, std::size_t got, std::size_t want) {
  if (got != want) {
    throw ValidationError(std::string("model input: ") + name + " has " + std::to_string(got) + " entries, expected " +
                          std::to_string(want));
  }
}

void check_index(const char* name, const std::vector<int>& idx, std::size_t levels) {
  for (std::size_t r = 0; r < idx.size(); ++r) {
    if (idx[r] < 0 || static_cast<std::size_t>(idx[r]) >= levels) {
      throw ValidationError(std::string("model input: ") + name + "[" + std::to_string(r) + "] = " +
                            std::to_string(idx[r]) + " out of range");
    }
  }
}

}  // namespace

std::string to_string(ModelKind kind) {
  for (const auto& [k, n] : kNames) {
    if (k == kind) return n;
  }
  return "unknown";
}

ModelKind parse_model_kind(const std::string& name) {
  for (const auto& [k, n] : kNames) {
    if (name == n) return k;
  }
  std::string known;
  for (const auto& [k, n] : kNames) known += (known.empty() ? "" : ", ") + std::string(n);
  throw ValidationError("unknown model '" + name + "' (known: " + known + ")");
}

std::size_t ModelInput::rows() const {
  switch (kind) {
    case ModelKind::BradleyTerry:
    case ModelKind::Davidson:
      return outcome.size();
    default:
      return y.size();
  }
}

void ModelInput::validate() const {
  const std::size_t n = rows();
  if (n == 0) throw ValidationError("model input: no observations");
  if (algorithms.empty() || benchmarks.empty()) throw ValidationError("model input: empty level names");
  check_size("bm", bm.size(), n);
  check_index("bm", bm, benchmarks.size());

  switch (kind) {
    case ModelKind::BradleyTerry:
    case ModelKind::Davidson:
      check_size("alg0", alg0.size(), n);
      check_size("alg1", alg1.size(), n);
      check_index("alg0", alg0, algorithms.size());
      check_index("alg1", alg1, algorithms.size());
      for (std::size_t r = 0; r < n; ++r) {
        if (alg0[r] == alg1[r]) throw ValidationError("model input: pair row " + std::to_string(r) + " is a self-pair");
        const int o = static_cast<int>(outcome[r]);
        if (o < 0 || o > 2) throw ValidationError("model input: bad outcome code in row " + std::to_string(r));
        if (kind == ModelKind::BradleyTerry && outcome[r] == PairOutcome::Tie) {
          throw ValidationError("model input: tie in row " + std::to_string(r) +
                                "; use the tie model or random tie breaking");
        }
      }
      return;
    default:
      break;
  }

  check_size("alg", alg.size(), n);
  check_index("alg", alg, algorithms.size());
  for (std::size_t r = 0; r < n; ++r) {
    if (!std::isfinite(y[r])) throw ValidationError("model input: y[" + std::to_string(r) + "] is not finite");
  }
  if (kind == ModelKind::Binomial) {
    check_size("trials", trials.size(), n);
    check_size("x_noise", x_noise.size(), n);
    for (std::size_t r = 0; r < n; ++r) {
      if (trials[r] < 1) throw ValidationError("model input: trials[" + std::to_string(r) + "] < 1");
      if (y[r] < 0 || y[r] > trials[r] || y[r] != std::floor(y[r])) {
        throw ValidationError("model input: y[" + std::to_string(r) + "] must be an integer in [0, N]");
      }
    }
  } else if (kind == ModelKind::Cox) {
    check_size("x_noise", x_noise.size(), n);
    check_size("event", event.size(), n);
    if (!censor_time.empty()) check_size("censor_time", censor_time.size(), n);
    for (std::size_t r = 0; r < n; ++r) {
      if (!(y[r] > 0)) throw ValidationError("model input: survival time y[" + std::to_string(r) + "] must be > 0");
      if (event[r] != 0 && event[r] != 1) throw ValidationError("model input: event flags must be 0 or 1");
    }
  } else if (kind == ModelKind::StudentT) {
    std::map<int, int> count;
    for (int a : alg) ++count[a];
    for (std::size_t a = 0; a < algorithms.size(); ++a) {
      if (count[static_cast<int>(a)] < 2) {
        throw ValidationError("model input: algorithm " + algorithms[a] + " needs at least 2 observations");
      }
    }
  }
}

}  // namespace bayesbench
