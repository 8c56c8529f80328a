#include <fstream>
#include <json.hpp>

#include "rsynth/benchmarks.hpp"

namespace rsynth {

namespace {

using nlohmann::json;

json vec_to_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vec vec_from_json(const json& a) {
  Vec v(static_cast<int>(a.size()));
  for (int i = 0; i < v.size(); ++i) v[i] = a[i].get<double>();
  return v;
}

json mat_to_json(const Mat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (int j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(r);
  }
  return rows;
}

Mat mat_from_json(const json& rows) {
  const int nr = static_cast<int>(rows.size());
  const int nc = nr > 0 ? static_cast<int>(rows[0].size()) : 0;
  Mat m(nr, nc);
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nc; ++j) m(i, j) = rows[i][j].get<double>();
  return m;
}

json word_to_json(const BinaryWord& w) {
  json a = json::array();
  for (auto b : w) a.push_back(static_cast<int>(b));
  return a;
}

BinaryWord word_from_json(const json& a) {
  BinaryWord w;
  for (const auto& b : a) w.push_back(static_cast<std::uint8_t>(b.get<int>()));
  return w;
}

json box_to_json(const Box& b) {
  return json{{"lo", vec_to_json(b.lo)}, {"hi", vec_to_json(b.hi)}};
}

Box box_from_json(const json& j) {
  return Box{vec_from_json(j.at("lo")), vec_from_json(j.at("hi"))};
}

}  // namespace

std::string scenario_to_json(const Scenario& sc) {
  json j;
  j["name"] = sc.name;

  json jm;
  jm["type"] = sc.model.type;
  jm["params"] = sc.model.params;
  jm["state_bounds"] = box_to_json(sc.model.state_bounds);
  jm["input_bounds"] = box_to_json(sc.model.input_bounds);
  jm["wrap"] = sc.model.wrap;
  jm["binary_dim"] = sc.model.binary_dim;
  if (!sc.model.pwa_modes.empty()) {
    json modes = json::array();
    for (const auto& pm : sc.model.pwa_modes) {
      modes.push_back(json{{"binary", word_to_json(pm.binary)},
                           {"a", mat_to_json(pm.a_mat)},
                           {"b", mat_to_json(pm.b_mat)},
                           {"offset", vec_to_json(pm.offset)}});
    }
    jm["modes"] = modes;
  }
  j["model"] = jm;

  j["partition"] = json{{"seed", sc.seed}};

  json jf;
  jf["t_rs"] = sc.family.t_rs;
  jf["intervals"] = sc.family.intervals;
  jf["amplitudes"] = sc.family.amplitudes;
  json words = json::array();
  for (const auto& w : sc.family.binary_words) words.push_back(word_to_json(w));
  jf["binary_words"] = words;
  jf["budget"] = sc.family.budget;
  jf["sample_count"] = sc.family.sample_count;
  jf["sample_seed"] = sc.family.sample_seed;
  j["inputs"] = jf;

  j["costs"] = json{{"q1", vec_to_json(sc.costs.q1)},
                    {"q2", vec_to_json(sc.costs.q2)},
                    {"r", vec_to_json(sc.costs.r)},
                    {"p", sc.costs.p}};

  json js;
  js["delta1"] = sc.supervisor.delta1;
  js["delta2"] = sc.supervisor.delta2;
  js["t_s"] = sc.supervisor.t_s;
  js["t_fs_max"] = sc.supervisor.t_fs_max;
  js["max_steps"] = sc.supervisor.max_steps;
  js["capture_dwell"] = sc.supervisor.capture_dwell;
  js["noise_amplitude"] = vec_to_json(sc.supervisor.noise_amplitude);
  j["supervisor"] = js;

  j["stabilizer"] = json{{"type", sc.stabilizer.type}, {"params", sc.stabilizer.params}};

  j["placement"] = json{{"corner_probes", sc.placement.corner_probes},
                        {"dwell_fraction", sc.placement.dwell_fraction},
                        {"corner_inset", sc.placement.corner_inset},
                        {"t_fs_max", sc.placement.t_fs_max}};

  j["init"] = vec_to_json(sc.init);
  j["des"] = vec_to_json(sc.des);
  return j.dump(2) + "\n";
}

Scenario scenario_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("scenario parse error: ") + e.what());
  }
  try {
    Scenario sc;
    sc.name = j.at("name").get<std::string>();

    const json& jm = j.at("model");
    sc.model.type = jm.at("type").get<std::string>();
    sc.model.params = jm.at("params").get<std::map<std::string, double>>();
    sc.model.state_bounds = box_from_json(jm.at("state_bounds"));
    sc.model.input_bounds = box_from_json(jm.at("input_bounds"));
    sc.model.wrap = jm.at("wrap").get<std::vector<bool>>();
    sc.model.binary_dim = jm.at("binary_dim").get<int>();
    if (jm.contains("modes")) {
      for (const auto& pm : jm.at("modes")) {
        PwaMode mode;
        mode.binary = word_from_json(pm.at("binary"));
        mode.a_mat = mat_from_json(pm.at("a"));
        mode.b_mat = mat_from_json(pm.at("b"));
        mode.offset = vec_from_json(pm.at("offset"));
        sc.model.pwa_modes.push_back(std::move(mode));
      }
    }

    sc.seed = j.at("partition").at("seed").get<std::vector<int>>();

    const json& jf = j.at("inputs");
    sc.family.t_rs = jf.at("t_rs").get<double>();
    sc.family.intervals = jf.at("intervals").get<int>();
    sc.family.amplitudes = jf.at("amplitudes").get<std::vector<std::vector<double>>>();
    sc.family.binary_words.clear();
    for (const auto& w : jf.at("binary_words")) sc.family.binary_words.push_back(word_from_json(w));
    sc.family.budget = jf.at("budget").get<std::uint64_t>();
    sc.family.sample_count = jf.at("sample_count").get<std::uint64_t>();
    sc.family.sample_seed = jf.at("sample_seed").get<std::uint64_t>();

    const json& jc = j.at("costs");
    sc.costs.q1 = vec_from_json(jc.at("q1"));
    sc.costs.q2 = vec_from_json(jc.at("q2"));
    sc.costs.r = vec_from_json(jc.at("r"));
    sc.costs.p = jc.at("p").get<double>();

    const json& js = j.at("supervisor");
    sc.supervisor.delta1 = js.at("delta1").get<double>();
    sc.supervisor.delta2 = js.at("delta2").get<double>();
    sc.supervisor.t_s = js.at("t_s").get<double>();
    sc.supervisor.t_fs_max = js.at("t_fs_max").get<double>();
    sc.supervisor.max_steps = js.at("max_steps").get<int>();
    sc.supervisor.capture_dwell = js.at("capture_dwell").get<int>();
    sc.supervisor.noise_amplitude = vec_from_json(js.at("noise_amplitude"));

    sc.stabilizer.type = j.at("stabilizer").at("type").get<std::string>();
    sc.stabilizer.params = j.at("stabilizer").at("params").get<std::map<std::string, double>>();

    const json& jp = j.at("placement");
    sc.placement.corner_probes = jp.at("corner_probes").get<bool>();
    sc.placement.dwell_fraction = jp.at("dwell_fraction").get<double>();
    sc.placement.corner_inset = jp.at("corner_inset").get<double>();
    sc.placement.t_fs_max = jp.at("t_fs_max").get<double>();

    sc.init = vec_from_json(j.at("init"));
    sc.des = vec_from_json(j.at("des"));
    return sc;
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("scenario field error: ") + e.what());
  }
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open scenario file '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return scenario_from_json(text);
}

void save_scenario(const Scenario& sc, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigurationError("cannot write scenario file '" + path + "'");
  out << scenario_to_json(sc);
}

}  // namespace rsynth
