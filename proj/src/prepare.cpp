// Filters and the derived model inputs. None of these views are persisted.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <tuple>

#include <nlohmann/json.hpp>

#include "bayesbench/error.hpp"
#include "bayesbench/harness.hpp"
#include "bayesbench/random.hpp"

namespace bayesbench {
namespace {

const std::set<std::string> kFilterKeys{"algorithm", "benchmark", "noise", "budget_per_dim", "dimension",
                                        "repetition"};

double number(const std::string& key, const std::string& s) {
  double v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ValidationError("filter " + key + ": '" + s + "' is not a number");
  }
  return v;
}

bool numeric_in(const std::set<std::string>& values, const std::string& key, double x) {
  for (const auto& v : values) {
    if (number(key, v) == x) return true;
  }
  return false;
}

// Index lookup that keeps first-seen order sorted by name.
struct Levels {
  std::vector<std::string> names;
  std::map<std::string, int> index;

  static Levels from(std::vector<std::string> ids) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    Levels l;
    l.names = ids;
    for (std::size_t i = 0; i < ids.size(); ++i) l.index[ids[i]] = static_cast<int>(i);
    return l;
  }
};

std::vector<const RunRecord*> select(const Dataset& data, const Filters& filters) {
  std::vector<const RunRecord*> out;
  for (const auto& r : data.rows) {
    if (filters.matches(r)) out.push_back(&r);
  }
  if (out.empty()) throw ValidationError("filters select no rows");
  return out;
}

void set_levels(ModelInput& in, const std::vector<const RunRecord*>& rows) {
  std::vector<std::string> algs, bms;
  for (const auto* r : rows) {
    algs.push_back(r->algorithm);
    bms.push_back(r->benchmark);
  }
  in.algorithms = Levels::from(algs).names;
  in.benchmarks = Levels::from(bms).names;
}

int index_of(const std::vector<std::string>& names, const std::string& id) {
  return static_cast<int>(std::lower_bound(names.begin(), names.end(), id) - names.begin());
}

}  // namespace

void Filters::add(const std::string& expression) {
  const auto eq = expression.find('=');
  if (eq == std::string::npos) throw ValidationError("filter '" + expression + "': expected key=value");
  const std::string key = expression.substr(0, eq);
  std::string rest = expression.substr(eq + 1);
  std::size_t start = 0;
  for (;;) {
    const auto comma = rest.find(',', start);
    add(key, rest.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
}

void Filters::add(const std::string& key, const std::string& value) {
  if (!kFilterKeys.count(key)) throw ValidationError("filter: unknown key '" + key + "'");
  if (value.empty()) throw ValidationError("filter " + key + ": empty value");
  if (key != "algorithm" && key != "benchmark") number(key, value);
  terms_[key].insert(value);
}

bool Filters::matches(const RunRecord& r) const {
  for (const auto& [key, values] : terms_) {
    bool ok;
    if (key == "algorithm") {
      ok = values.count(r.algorithm) > 0;
    } else if (key == "benchmark") {
      ok = values.count(r.benchmark) > 0;
    } else if (key == "noise") {
      ok = numeric_in(values, key, r.noise);
    } else if (key == "budget_per_dim") {
      ok = numeric_in(values, key, static_cast<double>(r.budget_per_dim));
    } else if (key == "dimension") {
      ok = numeric_in(values, key, r.dimension);
    } else {
      ok = numeric_in(values, key, r.repetition);
    }
    if (!ok) return false;
  }
  return true;
}

Filters Filters::from_json(const nlohmann::json& j) {
  Filters f;
  if (j.is_null()) return f;
  if (j.is_array()) {
    for (const auto& e : j) f.add(e.get<std::string>());
    return f;
  }
  if (!j.is_object()) throw ValidationError("filters: expected an object or a list of key=value strings");
  for (const auto& [key, value] : j.items()) {
    if (value.is_array()) {
      for (const auto& v : value) f.add(key, v.is_string() ? v.get<std::string>() : v.dump());
    } else {
      f.add(key, value.is_string() ? value.get<std::string>() : value.dump());
    }
  }
  return f;
}

nlohmann::json Filters::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [key, values] : terms_) j[key] = std::vector<std::string>(values.begin(), values.end());
  return j;
}

ModelInput prepare_binomial(const Dataset& data, double epsilon, const Filters& filters) {
  const std::size_t e = data.epsilon_index(epsilon);
  const auto rows = select(data, filters);
  ModelInput in;
  in.kind = ModelKind::Binomial;
  set_levels(in, rows);

  using Key = std::tuple<std::string, std::string, double, long>;
  std::map<Key, std::pair<int, int>> groups;  // trials, successes
  for (const auto* r : rows) {
    auto& g = groups[{r->algorithm, r->benchmark, r->noise, r->budget_per_dim}];
    g.first += 1;
    g.second += r->solved[e] ? 1 : 0;
  }
  for (const auto& [key, g] : groups) {
    in.alg.push_back(index_of(in.algorithms, std::get<0>(key)));
    in.bm.push_back(index_of(in.benchmarks, std::get<1>(key)));
    in.x_noise.push_back(std::get<2>(key));
    in.trials.push_back(g.first);
    in.y.push_back(g.second);
  }
  in.validate();
  return in;
}

ModelInput prepare_relative_improvement(const Dataset& data, const Filters& filters) {
  std::vector<const RunRecord*> rows;
  for (const auto& r : data.rows) {
    if (r.noise == 0 && filters.matches(r)) rows.push_back(&r);
  }
  if (rows.empty()) throw ValidationError("filters select no noiseless rows");

  const std::string baseline = to_string(AlgorithmId::RandomSearch1);
  std::map<std::pair<std::string, long>, std::pair<double, int>> base;
  for (const auto* r : rows) {
    if (r->algorithm != baseline) continue;
    auto& b = base[{r->benchmark, r->budget_per_dim}];
    b.first += r->euclid;
    b.second += 1;
  }

  ModelInput in;
  in.kind = ModelKind::RelativeImprovement;
  std::vector<const RunRecord*> kept;
  std::set<std::pair<std::string, long>> degenerate;
  for (const auto* r : rows) {
    if (r->algorithm == baseline || r->algorithm == to_string(AlgorithmId::RandomSearch2)) continue;
    const auto it = base.find({r->benchmark, r->budget_per_dim});
    if (it == base.end()) {
      throw ValidationError("no " + baseline + " baseline for benchmark " + r->benchmark + " at budget " +
                            std::to_string(r->budget_per_dim));
    }
    if (it->second.first == 0) {
      degenerate.insert(it->first);
      continue;
    }
    kept.push_back(r);
  }
  for (const auto& [bm, budget] : degenerate) {
    in.warnings.push_back("dropped " + bm + " at budget " + std::to_string(budget) +
                          ": baseline mean distance is 0");
  }
  if (kept.empty()) throw ValidationError("no rows left after removing random-search baselines");
  set_levels(in, kept);
  for (const auto* r : kept) {
    const auto& b = base.at({r->benchmark, r->budget_per_dim});
    const double mean = b.first / b.second;
    in.alg.push_back(index_of(in.algorithms, r->algorithm));
    in.bm.push_back(index_of(in.benchmarks, r->benchmark));
    in.y.push_back(std::clamp((mean - r->euclid) / mean, -1.0, 1.0));
  }
  in.validate();
  return in;
}

ModelInput prepare_pairs(const Dataset& data, const Filters& filters, TieMode mode, std::uint64_t seed) {
  const auto rows = select(data, filters);
  ModelInput in;
  in.kind = mode == TieMode::KeepTies ? ModelKind::Davidson : ModelKind::BradleyTerry;
  set_levels(in, rows);
  if (in.algorithms.size() < 2) throw ValidationError("pairs need at least two algorithms");

  using Key = std::tuple<std::string, double, long, int>;
  std::map<Key, std::vector<const RunRecord*>> groups;
  for (const auto* r : rows) groups[{r->benchmark, r->noise, r->budget_per_dim, r->repetition}].push_back(r);

  Rng rng = SeedSequence(seed).child("ties").rng();
  std::bernoulli_distribution coin(0.5);
  for (auto& [key, members] : groups) {
    std::sort(members.begin(), members.end(),
              [](const RunRecord* a, const RunRecord* b) { return a->algorithm < b->algorithm; });
    for (std::size_t i = 1; i < members.size(); ++i) {
      if (members[i]->algorithm == members[i - 1]->algorithm) {
        throw ValidationError("duplicate run of " + members[i]->algorithm + " on " + std::get<0>(key) +
                              "; filter to a single condition");
      }
    }
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        const auto* a = members[i];
        const auto* b = members[j];
        PairOutcome o;
        if (b->delta_f < a->delta_f) {
          o = PairOutcome::Alg1Wins;
        } else if (a->delta_f < b->delta_f) {
          o = PairOutcome::Alg0Wins;
        } else if (mode == TieMode::KeepTies) {
          o = PairOutcome::Tie;
        } else {
          o = coin(rng) ? PairOutcome::Alg1Wins : PairOutcome::Alg0Wins;
        }
        in.alg0.push_back(index_of(in.algorithms, a->algorithm));
        in.alg1.push_back(index_of(in.algorithms, b->algorithm));
        in.bm.push_back(index_of(in.benchmarks, a->benchmark));
        in.outcome.push_back(o);
      }
    }
  }
  in.validate();
  return in;
}

ModelInput prepare_survival(const Dataset& data, double epsilon, const Filters& filters) {
  const std::size_t e = data.epsilon_index(epsilon);
  const auto rows = select(data, filters);
  ModelInput in;
  in.kind = ModelKind::Cox;
  set_levels(in, rows);
  for (const auto* r : rows) {
    in.alg.push_back(index_of(in.algorithms, r->algorithm));
    in.bm.push_back(index_of(in.benchmarks, r->benchmark));
    in.x_noise.push_back(r->noise);
    const double budget = static_cast<double>(r->budget_per_dim);
    if (r->feval[e]) {
      in.y.push_back(static_cast<double>(*r->feval[e]) / r->dimension);
      in.event.push_back(1);
    } else {
      in.y.push_back(budget);
      in.event.push_back(0);
    }
    in.censor_time.push_back(budget);
  }
  in.validate();
  return in;
}

ModelInput prepare_cpu(const Dataset& data, const Filters& filters) {
  const auto rows = select(data, filters);
  ModelInput in;
  in.kind = ModelKind::StudentT;
  set_levels(in, rows);
  for (const auto* r : rows) {
    // Every algorithm spends its whole budget.
    const double evals = static_cast<double>(r->budget_per_dim) * r->dimension;
    if (!(evals > 0)) throw ValidationError("run with zero evaluations");
    in.alg.push_back(index_of(in.algorithms, r->algorithm));
    in.bm.push_back(index_of(in.benchmarks, r->benchmark));
    in.y.push_back(1e4 * r->cpu_seconds / evals);
  }
  in.validate();
  return in;
}

}  // namespace bayesbench
