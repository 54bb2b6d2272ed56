#include "bayesbench/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bayesbench/error.hpp"
#include "bayesbench/random.hpp"

namespace bayesbench {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename T>
T get(const json& j, const std::string& path) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& prefix) {
  if (!j.is_object()) throw ValidationError(prefix + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ValidationError(prefix + "." + key + ": unknown field");
  }
}

json sampler_json(const SamplerConfig& s) {
  return {{"chains", s.chains},           {"warmup", s.warmup},       {"iterations", s.iterations},
          {"target_accept", s.target_accept}, {"max_depth", s.max_depth}, {"adapt", s.adapt},
          {"step_size", s.step_size},     {"init_radius", s.init_radius}};
}

void apply_sampler_json(const json& j, SamplerConfig& s) {
  reject_unknown(j, {"chains", "warmup", "iterations", "target_accept", "max_depth", "adapt", "step_size", "init_radius"},
                 "fit.sampler");
  for (const auto& [key, value] : j.items()) {
    const auto path = "fit.sampler." + key;
    if (key == "chains") s.chains = get<int>(value, path);
    if (key == "warmup") s.warmup = get<int>(value, path);
    if (key == "iterations") s.iterations = get<int>(value, path);
    if (key == "target_accept") s.target_accept = get<double>(value, path);
    if (key == "max_depth") s.max_depth = get<int>(value, path);
    if (key == "adapt") s.adapt = get<bool>(value, path);
    if (key == "step_size") s.step_size = get<double>(value, path);
    if (key == "init_radius") s.init_radius = get<double>(value, path);
  }
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  out.push_back(std::move(cell));
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  double v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw IoError(where + ": expected a number, got '" + s + "'");
  }
  return v;
}

std::string tie_name(TieMode m) { return m == TieMode::KeepTies ? "keep" : "random"; }

TieMode parse_tie_mode(const std::string& s) {
  if (s == "keep") return TieMode::KeepTies;
  if (s == "random") return TieMode::RandomWinner;
  throw ValidationError("fit.ties: expected 'keep' or 'random', got '" + s + "'");
}

void require_absent(const fs::path& p, bool force) {
  if (!force && fs::exists(p)) throw ValidationError("refusing to overwrite " + p.string() + " (use --force)");
}

json read_json(const fs::path& p) {
  const auto text = read_text(p.string());
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(p.string() + ": invalid JSON: " + e.what());
  }
}

bool is_pair(ModelKind k) { return k == ModelKind::BradleyTerry || k == ModelKind::Davidson; }

}  // namespace

FitRequest FitRequest::defaults(ModelKind kind) {
  FitRequest r;
  r.model = kind;
  r.sampler = default_sampler_config(kind);
  r.ties = kind == ModelKind::Davidson ? TieMode::KeepTies : TieMode::RandomWinner;
  return r;
}

void FitRequest::validate() const {
  sampler.validate();
  if (sampler.chains < 2) throw ValidationError("fit.sampler.chains: at least 2 chains are needed for R-hat");
  if (!(epsilon > 0)) throw ValidationError("fit.epsilon: must be > 0");
  if (!(hpd_mass > 0 && hpd_mass < 1)) throw ValidationError("fit.hpd_mass: must be in (0, 1)");
  if (model == ModelKind::BradleyTerry && ties == TieMode::KeepTies) {
    throw ValidationError("fit.ties: bradley_terry cannot keep ties; use davidson");
  }
  priors.validate();
}

FitRequest FitRequest::from_json(const json& j) {
  reject_unknown(j, {"model", "data", "filters", "epsilon", "ties", "priors", "sampler", "seed", "hpd_mass"}, "fit");
  if (!j.contains("model")) throw ValidationError("fit.model: required");
  FitRequest r = defaults(parse_model_kind(get<std::string>(j["model"], "fit.model")));
  if (j.contains("data")) r.data = get<std::string>(j["data"], "fit.data");
  if (j.contains("filters")) r.filters = Filters::from_json(j["filters"]);
  if (j.contains("epsilon")) r.epsilon = get<double>(j["epsilon"], "fit.epsilon");
  if (j.contains("ties")) r.ties = parse_tie_mode(get<std::string>(j["ties"], "fit.ties"));
  if (j.contains("priors")) r.priors = PriorOptions::from_json(j["priors"]);
  if (j.contains("sampler")) apply_sampler_json(j["sampler"], r.sampler);
  if (j.contains("seed")) r.seed = get<std::uint64_t>(j["seed"], "fit.seed");
  if (j.contains("hpd_mass")) r.hpd_mass = get<double>(j["hpd_mass"], "fit.hpd_mass");
  r.validate();
  return r;
}

json FitRequest::to_json() const {
  return {{"model", to_string(model)},      {"data", data},         {"filters", filters.to_json()},
          {"epsilon", epsilon},             {"ties", tie_name(ties)}, {"priors", priors.to_json()},
          {"sampler", sampler_json(sampler)}, {"seed", seed},         {"hpd_mass", hpd_mass}};
}

json to_json(const ModelInput& in) {
  json j{{"kind", to_string(in.kind)}, {"algorithms", in.algorithms}, {"benchmarks", in.benchmarks}};
  auto put = [&](const char* key, const auto& v) {
    if (!v.empty()) j[key] = v;
  };
  put("alg", in.alg);
  put("bm", in.bm);
  put("y", in.y);
  put("trials", in.trials);
  put("x_noise", in.x_noise);
  put("event", in.event);
  put("censor_time", in.censor_time);
  put("alg0", in.alg0);
  put("alg1", in.alg1);
  if (!in.outcome.empty()) {
    std::vector<int> codes;
    for (auto o : in.outcome) codes.push_back(static_cast<int>(o));
    j["outcome"] = codes;
  }
  put("warnings", in.warnings);
  return j;
}

ModelInput model_input_from_json(const json& j) {
  reject_unknown(j, {"kind", "algorithms", "benchmarks", "alg", "bm", "y", "trials", "x_noise", "event", "censor_time",
                     "alg0", "alg1", "outcome", "warnings"},
                 "input");
  ModelInput in;
  in.kind = parse_model_kind(get<std::string>(j.at("kind"), "input.kind"));
  auto take = [&](const char* key, auto& v) {
    if (j.contains(key)) v = get<std::decay_t<decltype(v)>>(j[key], std::string("input.") + key);
  };
  take("algorithms", in.algorithms);
  take("benchmarks", in.benchmarks);
  take("alg", in.alg);
  take("bm", in.bm);
  take("y", in.y);
  take("trials", in.trials);
  take("x_noise", in.x_noise);
  take("event", in.event);
  take("censor_time", in.censor_time);
  take("alg0", in.alg0);
  take("alg1", in.alg1);
  take("warnings", in.warnings);
  if (j.contains("outcome")) {
    for (int c : get<std::vector<int>>(j["outcome"], "input.outcome")) {
      if (c < 0 || c > 2) throw ValidationError("input.outcome: codes must be 0, 1 or 2");
      in.outcome.push_back(static_cast<PairOutcome>(c));
    }
  }
  in.validate();
  return in;
}

ModelInput prepare_input(const Dataset& data, const FitRequest& request) {
  switch (request.model) {
    case ModelKind::Binomial:
      return prepare_binomial(data, request.epsilon, request.filters);
    case ModelKind::RelativeImprovement:
      return prepare_relative_improvement(data, request.filters);
    case ModelKind::BradleyTerry:
    case ModelKind::Davidson: {
      auto in = prepare_pairs(data, request.filters, request.ties, request.seed);
      in.kind = request.model;
      return in;
    }
    case ModelKind::Cox:
      return prepare_survival(data, request.epsilon, request.filters);
    case ModelKind::StudentT:
      return prepare_cpu(data, request.filters);
  }
  throw ValidationError("unknown model kind");
}

Fit run_fit(const FitRequest& request, const Dataset& data) { return run_fit(request, prepare_input(data, request)); }

Fit run_fit(const FitRequest& request, const ModelInput& input) {
  request.validate();
  if (input.kind != request.model) {
    throw ValidationError("model input is " + to_string(input.kind) + " but the fit asks for " + to_string(request.model));
  }
  Fit fit;
  fit.request = request;
  fit.model = make_model(input, request.priors);
  SamplerConfig sampler = request.sampler;
  sampler.seed = SeedSequence(request.seed).child("sampler").seed();
  fit.draws = nuts_sample(fit.model->target(), sampler);
  fit.diagnostics = diagnose(fit.draws);
  return fit;
}

void write_draws_csv(const PosteriorDraws& d, const std::string& path) {
  std::ostringstream out;
  out << "chain,iteration,divergent,treedepth,accept_stat";
  for (const auto& n : d.names) out << ',' << csv_quote(n);
  out << '\n';
  for (int c = 0; c < d.chains; ++c) {
    for (int i = 0; i < d.iterations; ++i) {
      const std::size_t k = static_cast<std::size_t>(c) * d.iterations + i;
      out << c + 1 << ',' << i + 1 << ',' << static_cast<int>(d.divergent[k]) << ',' << d.treedepth[k] << ','
          << format_shortest(d.accept_stat[k]);
      for (int p = 0; p < d.dimension; ++p) out << ',' << format_shortest(d.at(c, i, p));
      out << '\n';
    }
  }
  write_text(path, out.str(), true);
}

PosteriorDraws read_draws_csv(const std::string& path) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": empty draws file");
  const auto header = csv_split(line);
  const std::vector<std::string> fixed{"chain", "iteration", "divergent", "treedepth", "accept_stat"};
  if (header.size() < fixed.size() + 1 || !std::equal(fixed.begin(), fixed.end(), header.begin())) {
    throw IoError(path + ": unexpected draws header");
  }
  PosteriorDraws d;
  d.names.assign(header.begin() + fixed.size(), header.end());
  d.dimension = static_cast<int>(d.names.size());
  long line_no = 1;
  std::vector<int> per_chain;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = csv_split(line);
    const auto where = path + ":" + std::to_string(line_no);
    if (cells.size() != header.size()) throw IoError(where + ": expected " + std::to_string(header.size()) + " columns");
    const int chain = static_cast<int>(parse_double(cells[0], where));
    const int iter = static_cast<int>(parse_double(cells[1], where));
    if (chain == static_cast<int>(per_chain.size()) + 1) per_chain.push_back(0);
    if (chain != static_cast<int>(per_chain.size())) throw IoError(where + ": chains must be contiguous from 1");
    if (iter != ++per_chain.back()) throw IoError(where + ": iterations must count up from 1");
    d.divergent.push_back(static_cast<std::uint8_t>(parse_double(cells[2], where) != 0));
    d.treedepth.push_back(static_cast<int>(parse_double(cells[3], where)));
    d.accept_stat.push_back(parse_double(cells[4], where));
    for (std::size_t p = fixed.size(); p < cells.size(); ++p) d.values.push_back(parse_double(cells[p], where));
  }
  if (per_chain.empty()) throw IoError(path + ": no draws");
  if (std::adjacent_find(per_chain.begin(), per_chain.end(), std::not_equal_to<>()) != per_chain.end()) {
    throw IoError(path + ": chains must be of equal length");
  }
  d.chains = static_cast<int>(per_chain.size());
  d.iterations = per_chain.front();
  return d;
}

void write_text(const std::string& path, const std::string& text, bool force) {
  const fs::path p(path);
  require_absent(p, force);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_table(const Table& table, const std::string& dir, const std::string& name, bool force) {
  write_text((fs::path(dir) / (name + ".csv")).string(), table.to_csv(), force);
  write_text((fs::path(dir) / (name + ".md")).string(), table.to_markdown(), force);
}

RankSummary fit_ranks(const Fit& fit, const RankOptions& options) {
  if (!is_pair(fit.request.model)) throw ValidationError("ranks need a bradley_terry or davidson fit");
  const auto& in = fit.model->input();
  return rank_posterior(fit.draws, in.algorithms, in.benchmarks, options);
}

Table diagnostics_table(const FitDiagnostics& d) {
  Table t;
  t.title = "Convergence diagnostics";
  t.columns = {"Parameter", "Mean", "SD", "R-hat", "ESS", "Note"};
  for (const auto& p : d.params) {
    std::string note = p.rhat.note;
    if (!p.ess.note.empty()) note += (note.empty() ? "" : "; ") + p.ess.note;
    t.add({p.name, Cell(p.mean, 3), Cell(p.sd, 3), p.rhat.defined ? Cell(p.rhat.value, 3) : Cell("NA"),
           p.ess.defined ? Cell(p.ess.value, 0) : Cell("NA"), note});
  }
  return t;
}

std::vector<std::pair<std::string, Table>> fit_tables(const Fit& fit, int rank_samples, int difference_samples) {
  std::vector<std::pair<std::string, Table>> out;
  const double mass = fit.request.hpd_mass;
  const auto& in = fit.model->input();
  out.emplace_back("summary", parameter_table(*fit.model, fit.draws, mass));
  if (is_pair(fit.request.model)) {
    RankOptions opt;
    opt.samples = rank_samples;
    opt.seed = SeedSequence(fit.request.seed).child("ranks").seed();
    out.emplace_back("ranks", rank_table(fit_ranks(fit, opt)));
  }
  if (fit.request.model == ModelKind::Cox) {
    out.emplace_back("hazards", hazard_table(hazard_summary(fit.draws, in.algorithms, mass)));
  }
  if (fit.request.model == ModelKind::StudentT && in.algorithms.size() > 1) {
    out.emplace_back("differences", difference_table(fit.draws, in.algorithms, difference_samples,
                                                     SeedSequence(fit.request.seed).child("differences").seed(), mass));
  }
  out.emplace_back("diagnostics", diagnostics_table(fit.diagnostics));
  return out;
}

void write_fit(const Fit& fit, const std::string& dir, bool force) {
  const fs::path root(dir);
  const auto tables = fit_tables(fit);
  std::vector<std::string> files{fit_files::kRequest, fit_files::kInput, fit_files::kDraws, fit_files::kDiagnostics};
  for (const auto& [name, t] : tables) {
    files.push_back(name + ".csv");
    files.push_back(name + ".md");
  }
  for (const auto& f : files) require_absent(root / f, force);
  fs::create_directories(root);

  json request{{"request", fit.request.to_json()},
               {"parameters", fit.model->names()},
               {"rows", fit.model->input().rows()},
               {"adaptation", {{"step_size", fit.draws.step_size}, {"inv_metric", fit.draws.inv_metric}}}};
  write_text((root / fit_files::kRequest).string(), request.dump(2) + "\n", true);
  write_text((root / fit_files::kInput).string(), to_json(fit.model->input()).dump() + "\n", true);
  write_draws_csv(fit.draws, (root / fit_files::kDraws).string());
  write_text((root / fit_files::kDiagnostics).string(), fit.diagnostics.to_json().dump(2) + "\n", true);
  for (const auto& [name, t] : tables) write_table(t, dir, name, true);
}

Fit load_fit(const std::string& dir) {
  const fs::path root(dir);
  for (const char* f : {fit_files::kRequest, fit_files::kInput, fit_files::kDraws}) {
    if (!fs::exists(root / f)) throw IoError("fit artifact missing: " + (root / f).string());
  }
  const auto meta = read_json(root / fit_files::kRequest);
  if (!meta.contains("request")) throw IoError((root / fit_files::kRequest).string() + ": no request field");
  Fit fit;
  fit.request = FitRequest::from_json(meta["request"]);
  fit.model = make_model(model_input_from_json(read_json(root / fit_files::kInput)), fit.request.priors);
  fit.draws = read_draws_csv((root / fit_files::kDraws).string());
  if (fit.draws.names != fit.model->names()) {
    throw IoError((root / fit_files::kDraws).string() + ": parameters do not match the model");
  }
  fit.draws.max_depth = fit.request.sampler.max_depth;
  if (meta.contains("adaptation")) {
    fit.draws.step_size = meta["adaptation"].value("step_size", std::vector<double>{});
    fit.draws.inv_metric = meta["adaptation"].value("inv_metric", std::vector<std::vector<double>>{});
  }
  fit.diagnostics = diagnose(fit.draws);
  return fit;
}

}  // namespace bayesbench
