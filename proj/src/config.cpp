#include "gpc/config.hpp"

#include <cmath>
#include <set>

namespace gpc {

namespace {

const char* type_name(const Json& j) { return j.type_name(); }

// Walks one object of the config tree, recording which keys were consumed so
// that leftovers can be reported as unknown.
class Section {
 public:
  Section(const Json* j, std::string path) : j_(j), path_(std::move(path)) {
    if (j_ && !j_->is_object())
      throw ConfigError(path_.empty() ? "<root>" : path_,
                        std::string("expected an object, got ") + type_name(*j_));
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const Json* get(const std::string& key) {
    seen_.insert(key);
    if (!j_) return nullptr;
    auto it = j_->find(key);
    return it == j_->end() ? nullptr : &*it;
  }

  Section child(const std::string& key) { return Section(get(key), field(key)); }

  void number(const std::string& key, double& out) {
    if (const Json* v = get(key)) out = as_number(*v, field(key));
  }
  void count(const std::string& key, std::size_t& out) {
    if (const Json* v = get(key)) out = static_cast<std::size_t>(as_u64(*v, field(key)));
  }
  void u64(const std::string& key, std::uint64_t& out) {
    if (const Json* v = get(key)) out = as_u64(*v, field(key));
  }
  void small(const std::string& key, unsigned& out) {
    if (const Json* v = get(key)) {
      const auto x = as_u64(*v, field(key));
      if (x > 4096) throw ConfigError(field(key), "must be at most 4096");
      out = static_cast<unsigned>(x);
    }
  }
  void boolean(const std::string& key, bool& out) {
    if (const Json* v = get(key)) {
      if (!v->is_boolean())
        throw ConfigError(field(key), std::string("expected a boolean, got ") + type_name(*v));
      out = v->get<bool>();
    }
  }
  void string(const std::string& key, std::string& out) {
    if (const Json* v = get(key)) out = as_string(*v, field(key));
  }
  void numbers(const std::string& key, std::vector<double>& out) {
    if (const Json* v = get(key)) out = as_numbers(*v, field(key));
  }
  void counts(const std::string& key, std::vector<std::size_t>& out) {
    if (const Json* v = get(key)) {
      require_array(*v, field(key));
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i)
        out.push_back(static_cast<std::size_t>(as_u64((*v)[i], indexed(key, i))));
    }
  }
  void strings(const std::string& key, std::vector<std::string>& out) {
    if (const Json* v = get(key)) {
      require_array(*v, field(key));
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i) out.push_back(as_string((*v)[i], indexed(key, i)));
    }
  }
  void matrix(const std::string& key, std::vector<std::vector<double>>& out) {
    if (const Json* v = get(key)) {
      require_array(*v, field(key));
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i) out.push_back(as_numbers((*v)[i], indexed(key, i)));
    }
  }

  void finish() const {
    if (!j_) return;
    for (auto it = j_->begin(); it != j_->end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(field(it.key()), "unknown key");
  }

 private:
  std::string indexed(const std::string& key, std::size_t i) const {
    return field(key) + "[" + std::to_string(i) + "]";
  }
  static void require_array(const Json& v, const std::string& path) {
    if (!v.is_array()) throw ConfigError(path, std::string("expected an array, got ") + type_name(v));
  }
  static double as_number(const Json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path, std::string("expected a number, got ") + type_name(v));
    return v.get<double>();
  }
  static std::uint64_t as_u64(const Json& v, const std::string& path) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
      return static_cast<std::uint64_t>(v.get<std::int64_t>());
    throw ConfigError(path, std::string("expected a non-negative integer, got ") +
                                (v.is_number() ? v.dump() : type_name(v)));
  }
  static std::string as_string(const Json& v, const std::string& path) {
    if (!v.is_string()) throw ConfigError(path, std::string("expected a string, got ") + type_name(v));
    return v.get<std::string>();
  }
  static std::vector<double> as_numbers(const Json& v, const std::string& path) {
    require_array(v, path);
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i)
      out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
  }

  const Json* j_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace

ExperimentConfig config_from_json(const Json& j) {
  ExperimentConfig c;
  Section root(&j, "");

  Section model = root.child("model");
  model.string("name", c.model.name);
  model.number("coupling", c.model.coupling);
  model.count("dim", c.model.dim);
  model.string("psi", c.model.psi);
  model.number("theta", c.model.theta);
  model.number("sigma", c.model.sigma);
  Section init = model.child("initial");
  init.string("law", c.initial.law);
  init.numbers("mean", c.initial.mean);
  init.matrix("covariance", c.initial.covariance);
  init.numbers("point", c.initial.point);
  init.numbers("lower", c.initial.lower);
  init.numbers("upper", c.initial.upper);
  init.numbers("mean_slope", c.initial.mean_slope);
  init.finish();
  model.finish();

  Section graphon = root.child("graphon");
  graphon.string("name", c.graphon.name);
  graphon.number("value", c.graphon.value);
  graphon.matrix("grid", c.graphon.grid);
  graphon.finish();

  Section sparsity = root.child("sparsity");
  std::string form = "dense";
  sparsity.string("form", form);
  sparsity.number("gamma", c.sparsity.gamma);
  if (form == "dense")
    c.sparsity.form = SparsityRule::Form::Dense;
  else if (form == "power_law")
    c.sparsity.form = SparsityRule::Form::PowerLaw;
  else
    throw ConfigError("sparsity.form", "expected dense or power_law, got '" + form + "'");
  sparsity.finish();

  Section grid = root.child("grid");
  grid.number("T", c.T);
  grid.count("M", c.M);
  grid.finish();

  Section exp = root.child("experiment");
  exp.string("run_id", c.run_id);
  exp.counts("n", c.n_values);
  exp.count("n_ref", c.n_ref);
  std::vector<std::string> metrics;
  exp.strings("metrics", metrics);
  if (exp.get("metrics")) {
    c.metrics.clear();
    for (std::size_t i = 0; i < metrics.size(); ++i) {
      try {
        c.metrics.push_back(metric_from_string(metrics[i]));
      } catch (const std::invalid_argument& e) {
        throw ConfigError("experiment.metrics[" + std::to_string(i) + "]", e.what());
      }
    }
  }
  std::string comparison = to_string(c.comparison);
  exp.string("comparison", comparison);
  try {
    c.comparison = comparison_from_string(comparison);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("experiment.comparison", e.what());
  }
  exp.numbers("thresholds", c.thresholds);
  exp.count("replications", c.replications);
  exp.u64("seed", c.master_seed);
  exp.small("threads", c.threads);
  exp.boolean("record_norm", c.record_norm);
  exp.number("confidence", c.confidence);
  exp.finish();

  Section bounds = root.child("bounds");
  bounds.number("delta", c.bounds.delta);
  bounds.number("K", c.bounds.bigK);
  bounds.strings("variants", c.bounds.variants);
  bounds.numbers("a_grid", c.bounds.a_grid);
  bounds.numbers("eta", c.bounds.eta);
  bounds.count("norm_n", c.bounds.norm_n);
  bounds.count("norm_replications", c.bounds.norm_replications);
  bounds.number("confidence", c.bounds.confidence);
  bounds.boolean("gram_check", c.bounds.gram_check);
  bounds.finish();

  root.finish();
  return c;
}

ExperimentConfig parse_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError("<document>", std::string("not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

Json config_to_json(const ExperimentConfig& c) {
  Json j;
  j["model"] = {{"name", c.model.name},   {"coupling", c.model.coupling}, {"dim", c.model.dim},
                {"psi", c.model.psi},     {"theta", c.model.theta},       {"sigma", c.model.sigma}};
  j["model"]["initial"] = {{"law", c.initial.law},       {"mean", c.initial.mean},
                           {"covariance", c.initial.covariance},
                           {"point", c.initial.point},   {"lower", c.initial.lower},
                           {"upper", c.initial.upper},   {"mean_slope", c.initial.mean_slope}};
  j["graphon"] = {{"name", c.graphon.name}, {"value", c.graphon.value}, {"grid", c.graphon.grid}};
  j["sparsity"] = {{"form", c.sparsity.form == SparsityRule::Form::Dense ? "dense" : "power_law"},
                   {"gamma", c.sparsity.gamma}};
  j["grid"] = {{"T", c.T}, {"M", c.M}};
  Json metrics = Json::array();
  for (Metric m : c.metrics) metrics.push_back(to_string(m));
  j["experiment"] = {{"run_id", c.run_id},
                     {"n", c.n_values},
                     {"n_ref", c.n_ref},
                     {"metrics", metrics},
                     {"comparison", to_string(c.comparison)},
                     {"thresholds", c.thresholds},
                     {"replications", c.replications},
                     {"seed", c.master_seed},
                     {"threads", c.threads},
                     {"record_norm", c.record_norm},
                     {"confidence", c.confidence}};
  j["bounds"] = {{"delta", c.bounds.delta},
                 {"K", c.bounds.bigK},
                 {"variants", c.bounds.variants},
                 {"a_grid", c.bounds.a_grid},
                 {"eta", c.bounds.eta},
                 {"norm_n", c.bounds.norm_n},
                 {"norm_replications", c.bounds.norm_replications},
                 {"confidence", c.bounds.confidence},
                 {"gram_check", c.bounds.gram_check}};
  return j;
}

namespace {

// Non-finite values have no JSON form; they are written as strings.
Json num(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

}  // namespace

Json to_json(const TailEstimate& t) {
  Json j = {{"n", t.n},
            {"metric", to_string(t.metric)},
            {"a", num(t.a)},
            {"R", t.R},
            {"exceed_count", t.exceed_count},
            {"overflow_count", t.overflow_count},
            {"p_hat", num(t.p_hat)},
            {"ci_low", num(t.ci_low)},
            {"ci_high", num(t.ci_high)},
            {"confidence", t.confidence}};
  j["analytic_bound"] = t.analytic_bound ? num(*t.analytic_bound) : Json(nullptr);
  return j;
}

Json to_json(const RateTable& t) {
  Json rows = Json::array();
  for (const auto& r : t.rows)
    rows.push_back({{"n", r.n}, {"p_n", num(r.p_n)}, {"mean", num(r.mean)}, {"std_error", num(r.std_error)}});
  Json j = {{"statistic", t.statistic},
            {"axis", t.axis == RateAxis::N ? "n" : "n_p_n"},
            {"rows", rows}};
  j["slope"] = t.slope ? num(*t.slope) : Json(nullptr);
  j["slope_std_error"] = t.slope_std_error ? num(*t.slope_std_error) : Json(nullptr);
  return j;
}

Json to_json(const BoundComparison& b) {
  return {{"kind", b.kind},         {"n", b.n},
          {"p_n", num(b.p_n)},      {"threshold", num(b.threshold)},
          {"R", b.R},               {"exceed_count", b.exceed_count},
          {"p_hat", num(b.p_hat)},  {"ci_low", num(b.ci_low)},
          {"ci_high", num(b.ci_high)}, {"confidence", b.confidence},
          {"bound", num(b.bound)},  {"verdict", to_string(b.verdict)},
          {"warnings", b.warnings}};
}

Json to_json(const MeanEstimate& m) {
  return {{"mean", num(m.mean)}, {"std_error", num(m.std_error)}, {"count", m.count}};
}

}  // namespace gpc
