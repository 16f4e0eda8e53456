#include "bcs/scenario.hpp"

#include "json.hpp"  // vendored nlohmann/json

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bcs {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void bad_key(const std::string& key, const std::string& why) {
  throw ScenarioError("scenario: key '" + key + "' " + why);
}

const json& need(const json& j, const std::string& key, const std::string& scope) {
  auto it = j.find(key);
  if (it == j.end()) bad_key(scope + key, "is missing");
  return *it;
}

Matrix parse_matrix(const json& j, int dim, const std::string& key) {
  if (!j.is_array() || int(j.size()) != dim * dim)
    bad_key(key, "must be a flat row-major list of dim*dim numbers");
  Matrix m(dim, dim);
  int idx = 0;
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) {
      const auto& e = j[size_t(idx++)];
      if (!e.is_number()) bad_key(key, "has a non-numeric entry");
      m(r, c) = e.get<double>();
    }
  return m;
}

json emit_matrix(const Matrix& m) {
  json j = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) j.push_back(m(r, c));
  return j;
}

Vector parse_vector(const json& j, const std::string& key, int expect = -1) {
  if (!j.is_array()) bad_key(key, "must be a list of numbers");
  if (expect >= 0 && int(j.size()) != expect) bad_key(key, "has the wrong length");
  Vector v(Eigen::Index(j.size()));
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) bad_key(key, "has a non-numeric entry");
    v(Eigen::Index(i)) = j[i].get<double>();
  }
  return v;
}

template <typename T>
void maybe(const json& j, const char* key, T& slot) {
  if (auto it = j.find(key); it != j.end()) slot = it->get<T>();
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("scenario: parse error: ") + e.what());
  }

  const std::string name = need(j, "name", "").get<std::string>();
  const json& sys = need(j, "system", "");
  const int dim = need(sys, "dim", "system.").get<int>();
  if (dim < 1) bad_key("system.dim", "must be >= 1");
  Matrix a = parse_matrix(need(sys, "A", "system."), dim, "system.A");
  const json& bsj = need(sys, "B", "system.");
  if (!bsj.is_array() || bsj.empty()) bad_key("system.B", "must be a nonempty list of matrices");
  std::vector<Matrix> bs;
  for (size_t i = 0; i < bsj.size(); ++i)
    bs.push_back(parse_matrix(bsj[i], dim, "system.B[" + std::to_string(i) + "]"));
  Vector lo = parse_vector(need(sys, "u_lo", "system."), "system.u_lo", int(bs.size()));
  Vector hi = parse_vector(need(sys, "u_hi", "system."), "system.u_hi", int(bs.size()));

  Scenario out{name, BilinearSystem(std::move(a), std::move(bs), std::move(lo), std::move(hi)),
               ScenarioDefaults{}, std::nullopt};

  if (auto dj = j.find("defaults"); dj != j.end()) {
    auto& d = out.defaults;
    maybe(*dj, "seed", d.seed);
    maybe(*dj, "grid", d.grid);
    maybe(*dj, "bins", d.bins);
    maybe(*dj, "tau", d.tau);
    maybe(*dj, "tol", d.tol);
    maybe(*dj, "control_samples", d.control_samples);
    maybe(*dj, "graph_samples", d.graph_samples);
    maybe(*dj, "horizon", d.horizon);
    maybe(*dj, "segments", d.segments);
    maybe(*dj, "restarts", d.restarts);
    maybe(*dj, "budget", d.budget);
    maybe(*dj, "angular_tol", d.angular_tol);
    maybe(*dj, "access_grid", d.access_grid);
    maybe(*dj, "access_depth", d.access_depth);
    maybe(*dj, "set_tol", d.set_tol);
    maybe(*dj, "verify_tol", d.verify_tol);
    maybe(*dj, "verify_tau", d.verify_tau);
    maybe(*dj, "verify_samples", d.verify_samples);
    maybe(*dj, "verify_times", d.verify_times);
  }

  if (auto ej = j.find("expected"); ej != j.end()) {
    ExpectedResults exp;
    if (auto it = ej->find("accessible"); it != ej->end()) exp.accessible = it->get<bool>();
    if (auto it = ej->find("rate"); it != ej->end()) exp.rate = it->get<double>();
    if (auto it = ej->find("rate_lower_min"); it != ej->end())
      exp.rate_lower_min = it->get<double>();
    if (auto it = ej->find("arcs"); it != ej->end()) {
      for (const auto& aj : *it) {
        if (!aj.is_array() || aj.size() != 2) bad_key("expected.arcs", "entries must be [start, end]");
        exp.arcs.push_back({aj[0].get<double>(), aj[1].get<double>()});
      }
    }
    maybe(*ej, "arc_tol_bins", exp.arc_tol_bins);
    if (auto it = ej->find("witnesses"); it != ej->end()) {
      for (const auto& wj : *it) {
        ExpectedResults::WitnessCase w;
        Vector s = parse_vector(need(wj, "seed", "expected.witnesses."), "expected.witnesses.seed", 2);
        w.seed = {s(0), s(1)};
        if (auto pj = wj.find("polygon"); pj != wj.end()) {
          for (const auto& vj : *pj) {
            Vector p = parse_vector(vj, "expected.witnesses.polygon", 2);
            w.polygon.push_back({p(0), p(1)});
          }
        }
        if (auto sj = wj.find("spiral_rate"); sj != wj.end()) w.spiral_rate = sj->get<double>();
        exp.witnesses.push_back(std::move(w));
      }
    }
    maybe(*ej, "union_scales", exp.union_scales);
    out.expected = std::move(exp);
  }
  return out;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("scenario: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string emit_scenario(const Scenario& s) {
  json j;
  j["name"] = s.name;
  json sys;
  sys["dim"] = s.system.dim();
  sys["A"] = emit_matrix(s.system.a);
  json bsj = json::array();
  for (const auto& b : s.system.bs) bsj.push_back(emit_matrix(b));
  sys["B"] = bsj;
  sys["u_lo"] = std::vector<double>(s.system.u_lo.data(), s.system.u_lo.data() + s.system.u_lo.size());
  sys["u_hi"] = std::vector<double>(s.system.u_hi.data(), s.system.u_hi.data() + s.system.u_hi.size());
  j["system"] = sys;

  const auto& d = s.defaults;
  json dj;
  dj["seed"] = d.seed;
  dj["grid"] = d.grid;
  dj["bins"] = d.bins;
  dj["tau"] = d.tau;
  dj["tol"] = d.tol;
  dj["control_samples"] = d.control_samples;
  dj["graph_samples"] = d.graph_samples;
  dj["horizon"] = d.horizon;
  dj["segments"] = d.segments;
  dj["restarts"] = d.restarts;
  dj["budget"] = d.budget;
  dj["angular_tol"] = d.angular_tol;
  dj["access_grid"] = d.access_grid;
  dj["access_depth"] = d.access_depth;
  dj["set_tol"] = d.set_tol;
  dj["verify_tol"] = d.verify_tol;
  dj["verify_tau"] = d.verify_tau;
  dj["verify_samples"] = d.verify_samples;
  dj["verify_times"] = d.verify_times;
  j["defaults"] = dj;

  if (s.expected) {
    const auto& e = *s.expected;
    json ej;
    if (e.accessible) ej["accessible"] = *e.accessible;
    if (e.rate) ej["rate"] = *e.rate;
    if (e.rate_lower_min) ej["rate_lower_min"] = *e.rate_lower_min;
    if (!e.arcs.empty()) {
      json aj = json::array();
      for (const auto& a : e.arcs) aj.push_back({a[0], a[1]});
      ej["arcs"] = aj;
    }
    ej["arc_tol_bins"] = e.arc_tol_bins;
    if (!e.witnesses.empty()) {
      json wj = json::array();
      for (const auto& w : e.witnesses) {
        json one;
        one["seed"] = {w.seed.x(), w.seed.y()};
        if (!w.polygon.empty()) {
          json pj = json::array();
          for (const auto& p : w.polygon) pj.push_back({p.x(), p.y()});
          one["polygon"] = pj;
        }
        if (w.spiral_rate) one["spiral_rate"] = *w.spiral_rate;
        wj.push_back(one);
      }
      ej["witnesses"] = wj;
    }
    if (!e.union_scales.empty()) ej["union_scales"] = e.union_scales;
    j["expected"] = ej;
  }
  return j.dump(2) + "\n";
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ScenarioError("scenario: cannot write " + path.string());
  out << emit_scenario(s);
}

bool operator==(const Scenario& a, const Scenario& b) {
  return emit_scenario(a) == emit_scenario(b);
}

}  // namespace bcs
