#include "uljam/scenario.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace uljam {

using nlohmann::json;

const UeProfile& ScenarioConfig::profile(const std::string& name) const
{
  for (const UeProfile& p : profiles) {
    if (p.name == name) {
      return p;
    }
  }
  throw std::invalid_argument("scenario: unknown ue profile '" + name + "'");
}

void ScenarioConfig::validate() const
{
  if (duration_s <= 0) {
    throw std::invalid_argument("duration_s: must be positive");
  }
  if (grid.pucch_edge_rbs == 0 || 2 * grid.pucch_edge_rbs >= grid.total_rbs) {
    throw std::invalid_argument("grid.pucch_edge_rbs: invalid PUCCH region");
  }
  if (grid.total_rbs > RbGrid::kMaxRbs) {
    throw std::invalid_argument("grid.total_rbs: exceeds supported maximum");
  }
  if (budget.ue_signal_db <= budget.noise_floor_db) {
    throw std::invalid_argument("link_budget.ue_signal_db: must exceed the noise floor");
  }
  mcs.validate();
  if (sched.grant_delay_subframes < 1) {
    throw std::invalid_argument("scheduler.grant_delay_subframes: must be >= 1");
  }
  if (sched.adaptation_fail_threshold <= 0 || sched.adaptation_fail_threshold > 1) {
    throw std::invalid_argument("scheduler.adaptation_fail_threshold: must be in (0,1]");
  }
  if (sched.adaptation_window == 0 || sched.adaptation_window > 64) {
    throw std::invalid_argument("scheduler.adaptation_window: must be in [1,64]");
  }
  if (sched.rnti_policy == RntiPolicy::Hopping && sched.hopping_period == 0) {
    throw std::invalid_argument("scheduler.hopping_period: must be positive");
  }
  if (traffic.packet_size_bytes == 0 || traffic.interval_subframes == 0 ||
      traffic.buffer_capacity_packets == 0) {
    throw std::invalid_argument("traffic: all fields must be positive");
  }
  if (harq.processes == 0 || harq.processes > 8) {
    throw std::invalid_argument("harq.processes: must be in [1,8]");
  }
  if (profiles.empty()) {
    throw std::invalid_argument("profiles: at least one profile required");
  }
  for (const UeProfile& p : profiles) {
    if (p.max_rach_attempts < 6 || p.max_rach_attempts > 200) {
      throw std::invalid_argument("profile " + p.name + ".max_rach_attempts: must be in [6,200]");
    }
    if (p.barring_s > 300.0) {
      throw std::invalid_argument("profile " + p.name + ".barring_s: must be <= 300");
    }
    if (p.backoff_cap_s < p.backoff_base_s) {
      throw std::invalid_argument("profile " + p.name + ".backoff_cap_s: below backoff_base_s");
    }
    if (p.crash_probability_per_rlf < 0 || p.crash_probability_per_rlf > 1) {
      throw std::invalid_argument("profile " + p.name + ".crash_probability_per_rlf: not in [0,1]");
    }
  }
  if (ues.empty()) {
    throw std::invalid_argument("ues: at least one UE required");
  }
  for (const UeInstanceConfig& u : ues) {
    profile(u.profile);  // resolves or throws
    if (u.connect_at_s < 0 || u.connect_at_s >= duration_s) {
      throw std::invalid_argument("ues.connect_at_s: outside the run");
    }
  }
  if (jammer.kind != JammerKind::None) {
    if (jammer.active_start_s >= jammer.active_end_s || jammer.active_end_s > duration_s) {
      throw std::invalid_argument("jammer.active window: need start < end <= duration_s");
    }
    if (jammer.duty_cycle <= 0 || jammer.duty_cycle > 1) {
      throw std::invalid_argument("jammer.duty_cycle: must be in (0,1]");
    }
  }
}

void SweepConfig::validate() const
{
  if (gains_db.empty()) {
    throw std::invalid_argument("sweep.gains_db: must be non-empty");
  }
  if (runs_per_gain < 1) {
    throw std::invalid_argument("sweep.runs_per_gain: must be >= 1");
  }
  base.validate();
}

ScenarioConfig default_scenario()
{
  ScenarioConfig cfg;
  // 8-level ladder; thresholds/capacity shape the link-adaptation
  // response and live here (and in the shipped files), not in code.
  cfg.mcs.levels = {
      {-2.0, 160}, {0.0, 224}, {3.0, 320}, {6.0, 448},
      {9.0, 640},  {12.0, 896}, {15.0, 1152}, {18.0, 1440},
  };
  UeProfile a;
  a.name = "modem-a";
  a.reestablish_with_previous_rnti = true;
  a.fresh_connection_sinr_deficit_db = 24.5;
  a.backoff_base_s = 2.0;
  a.backoff_growth = 2.0;
  a.backoff_cap_s = 12.0;
  a.max_rach_attempts = 6;
  a.barring_s = 300.0;
  a.rlf_consecutive_failures = 40;
  a.crash_probability_per_rlf = 0.05;

  UeProfile b = a;
  b.name = "modem-b";
  b.fresh_connection_sinr_deficit_db.reset();
  b.backoff_growth = 1.5;
  b.backoff_cap_s = 22.0;
  b.crash_probability_per_rlf = 0.0;

  cfg.profiles = {a, b};
  cfg.ues = {UeInstanceConfig{"modem-a", 0.0}};
  return cfg;
}

SweepConfig default_sweep(const ScenarioConfig& base)
{
  SweepConfig sweep;
  for (int g = 1; g <= 35; g += 2) {
    sweep.gains_db.push_back(static_cast<PowerDb>(g));
  }
  sweep.runs_per_gain = 20;
  sweep.base = base;
  return sweep;
}

// --- JSON loading ------------------------------------------------------------

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& why)
{
  throw std::invalid_argument("config field '" + field + "': " + why);
}

template <typename T>
void get_if_present(const json& j, const char* key, T& out)
{
  if (j.contains(key)) {
    try {
      out = j.at(key).get<T>();
    } catch (const json::exception&) {
      bad_field(key, "wrong type");
    }
  }
}

RntiPolicy parse_policy(const std::string& s)
{
  if (s == "reuse_on_reestablish") return RntiPolicy::ReuseOnReestablish;
  if (s == "fresh_per_connection") return RntiPolicy::FreshPerConnection;
  if (s == "hopping") return RntiPolicy::Hopping;
  bad_field("scheduler.rnti_policy", "expected reuse_on_reestablish|fresh_per_connection|hopping");
}

JammerKind parse_kind(const std::string& s)
{
  if (s == "none") return JammerKind::None;
  if (s == "barrage") return JammerKind::Barrage;
  if (s == "pucch_jam") return JammerKind::PucchJam;
  if (s == "pusch_targeted") return JammerKind::PuschTargeted;
  if (s == "prattle") return JammerKind::Prattle;
  bad_field("jammer.kind", "unknown kind '" + s + "'");
}

void parse_scenario_json(const json& j, ScenarioConfig& cfg)
{
  get_if_present(j, "duration_s", cfg.duration_s);
  get_if_present(j, "seed", cfg.seed);
  get_if_present(j, "flush_subframes", cfg.flush_subframes);

  if (j.contains("grid")) {
    const json& g = j.at("grid");
    get_if_present(g, "total_rbs", cfg.grid.total_rbs);
    get_if_present(g, "pucch_edge_rbs", cfg.grid.pucch_edge_rbs);
  }
  if (j.contains("link_budget")) {
    const json& b = j.at("link_budget");
    get_if_present(b, "ue_signal_db", cfg.budget.ue_signal_db);
    get_if_present(b, "noise_floor_db", cfg.budget.noise_floor_db);
    get_if_present(b, "jammer_base_db", cfg.budget.jammer_base_db);
    get_if_present(b, "pucch_power_offset_db", cfg.budget.pucch_power_offset_db);
  }
  if (j.contains("mcs_table")) {
    cfg.mcs.levels.clear();
    for (const json& lvl : j.at("mcs_table")) {
      McsLevel m;
      get_if_present(lvl, "sinr_threshold_db", m.sinr_threshold_db);
      get_if_present(lvl, "bits_per_rb", m.bits_per_rb);
      cfg.mcs.levels.push_back(m);
    }
  }
  if (j.contains("scheduler")) {
    const json& s = j.at("scheduler");
    get_if_present(s, "grant_delay_subframes", cfg.sched.grant_delay_subframes);
    get_if_present(s, "adaptation_enabled", cfg.sched.adaptation_enabled);
    get_if_present(s, "adaptation_fail_threshold", cfg.sched.adaptation_fail_threshold);
    get_if_present(s, "adaptation_window", cfg.sched.adaptation_window);
    get_if_present(s, "adaptation_min_samples", cfg.sched.adaptation_min_samples);
    get_if_present(s, "adaptation_holdoff_subframes", cfg.sched.adaptation_holdoff_subframes);
    get_if_present(s, "probe_backoff_base", cfg.sched.probe_backoff_base);
    get_if_present(s, "pucch_fallback_threshold", cfg.sched.pucch_fallback_threshold);
    get_if_present(s, "pucch_probe_interval", cfg.sched.pucch_probe_interval);
    get_if_present(s, "hopping_period", cfg.sched.hopping_period);
    if (s.contains("rnti_policy")) {
      cfg.sched.rnti_policy = parse_policy(s.at("rnti_policy").get<std::string>());
    }
    if (s.contains("power_control")) {
      const json& p = s.at("power_control");
      get_if_present(p, "target_sinr_db", cfg.sched.power_control.target_sinr_db);
      get_if_present(p, "margin_db", cfg.sched.power_control.margin_db);
      get_if_present(p, "max_headroom_db", cfg.sched.power_control.max_headroom_db);
      get_if_present(p, "max_reduction_db", cfg.sched.power_control.max_reduction_db);
      get_if_present(p, "interval_subframes", cfg.sched.power_control.interval_subframes);
    }
  }
  if (j.contains("rach")) {
    const json& r = j.at("rach");
    get_if_present(r, "rar_delay_subframes", cfg.rach.rar_delay_subframes);
    get_if_present(r, "msg3_offset_subframes", cfg.rach.msg3_offset_subframes);
    get_if_present(r, "msg3_rbs", cfg.rach.msg3_rbs);
    get_if_present(r, "msg3_mcs", cfg.rach.msg3_mcs);
    get_if_present(r, "proc_timeout_subframes", cfg.rach.proc_timeout_subframes);
    get_if_present(r, "completion_bytes", cfg.rach.completion_bytes);
    get_if_present(r, "signalling_mcs_cap", cfg.rach.signalling_mcs_cap);
    get_if_present(r, "preamble_min_sinr_db", cfg.rach.preamble_min_sinr_db);
    get_if_present(r, "pucch_min_sinr_db", cfg.rach.pucch_min_sinr_db);
    get_if_present(r, "dtx_suspend_threshold", cfg.rach.dtx_suspend_threshold);
  }
  if (j.contains("traffic")) {
    const json& t = j.at("traffic");
    get_if_present(t, "packet_size_bytes", cfg.traffic.packet_size_bytes);
    get_if_present(t, "interval_subframes", cfg.traffic.interval_subframes);
    get_if_present(t, "buffer_capacity_packets", cfg.traffic.buffer_capacity_packets);
  }
  if (j.contains("harq")) {
    const json& h = j.at("harq");
    get_if_present(h, "processes", cfg.harq.processes);
    get_if_present(h, "max_retx", cfg.harq.max_retx);
  }
  if (j.contains("profiles")) {
    cfg.profiles.clear();
    for (auto it = j.at("profiles").begin(); it != j.at("profiles").end(); ++it) {
      UeProfile p;
      p.name = it.key();
      const json& v = it.value();
      get_if_present(v, "reestablish_with_previous_rnti", p.reestablish_with_previous_rnti);
      if (v.contains("fresh_connection_sinr_deficit_db") &&
          !v.at("fresh_connection_sinr_deficit_db").is_null()) {
        p.fresh_connection_sinr_deficit_db = v.at("fresh_connection_sinr_deficit_db").get<double>();
      }
      get_if_present(v, "backoff_base_s", p.backoff_base_s);
      get_if_present(v, "backoff_growth", p.backoff_growth);
      get_if_present(v, "backoff_cap_s", p.backoff_cap_s);
      get_if_present(v, "max_rach_attempts", p.max_rach_attempts);
      get_if_present(v, "barring_s", p.barring_s);
      get_if_present(v, "rlf_consecutive_failures", p.rlf_consecutive_failures);
      get_if_present(v, "crash_probability_per_rlf", p.crash_probability_per_rlf);
      cfg.profiles.push_back(std::move(p));
    }
  }
  if (j.contains("ues")) {
    cfg.ues.clear();
    for (const json& u : j.at("ues")) {
      UeInstanceConfig inst;
      get_if_present(u, "profile", inst.profile);
      get_if_present(u, "connect_at_s", inst.connect_at_s);
      cfg.ues.push_back(inst);
    }
  } else if (j.contains("ue_profile")) {
    cfg.ues = {UeInstanceConfig{j.at("ue_profile").get<std::string>(), 0.0}};
  }
  if (j.contains("jammer")) {
    const json& jm = j.at("jammer");
    if (jm.contains("kind")) {
      cfg.jammer.kind = parse_kind(jm.at("kind").get<std::string>());
    }
    get_if_present(jm, "gain_db", cfg.jammer.gain_db);
    get_if_present(jm, "active_start_s", cfg.jammer.active_start_s);
    get_if_present(jm, "active_end_s", cfg.jammer.active_end_s);
    get_if_present(jm, "duty_cycle", cfg.jammer.duty_cycle);
    get_if_present(jm, "duty_period_subframes", cfg.jammer.duty_period_subframes);
    if (jm.contains("target")) {
      if (jm.at("target").is_string() && jm.at("target").get<std::string>() == "victim") {
        cfg.jammer.target_is_victim = true;
      } else if (jm.at("target").is_number_unsigned()) {
        cfg.jammer.target_is_victim = false;
        cfg.jammer.explicit_candidates = {Rnti{jm.at("target").get<uint16_t>()}};
      } else {
        bad_field("jammer.target", "expected \"victim\" or an RNTI value");
      }
    }
  }
  if (j.contains("scrambling_mode")) {
    const std::string m = j.at("scrambling_mode").get<std::string>();
    if (m == "crc_mask_only") {
      cfg.scrambling = ScramblingMode::CrcMaskOnly;
    } else if (m == "full_scramble") {
      cfg.scrambling = ScramblingMode::FullScramble;
    } else {
      bad_field("scrambling_mode", "expected crc_mask_only|full_scramble");
    }
  }
  if (j.contains("sib_auth")) {
    const json& s = j.at("sib_auth");
    get_if_present(s, "enabled", cfg.sib_auth.enabled);
    get_if_present(s, "spoofed_barring", cfg.sib_auth.spoofed_barring);
    get_if_present(s, "public_key_path", cfg.sib_auth.public_key_path);
    get_if_present(s, "private_key_path", cfg.sib_auth.private_key_path);
  }
}

json load_json_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open config file: " + path);
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument("config parse error in " + path + ": " + e.what());
  }
  return j;
}

} // namespace

static void resolve_key_paths(ScenarioConfig& cfg, const std::string& config_path)
{
  const auto slash = config_path.find_last_of('/');
  const std::string dir = slash == std::string::npos ? "" : config_path.substr(0, slash + 1);
  auto fix = [&dir](std::string& p) {
    if (!p.empty() && p.front() != '/') {
      p = dir + p;
    }
  };
  fix(cfg.sib_auth.public_key_path);
  fix(cfg.sib_auth.private_key_path);
}

ScenarioConfig load_scenario(const std::string& path)
{
  const json j = load_json_file(path);
  ScenarioConfig cfg = default_scenario();
  parse_scenario_json(j, cfg);
  resolve_key_paths(cfg, path);
  cfg.validate();
  return cfg;
}

SweepConfig load_sweep(const std::string& path)
{
  const json j = load_json_file(path);
  ScenarioConfig base = default_scenario();
  parse_scenario_json(j, base);
  resolve_key_paths(base, path);
  base.validate();

  SweepConfig sweep = default_sweep(base);
  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    if (s.contains("gains_db")) {
      sweep.gains_db = s.at("gains_db").get<std::vector<double>>();
    }
    get_if_present(s, "runs_per_gain", sweep.runs_per_gain);
  }
  sweep.validate();
  return sweep;
}

} // namespace uljam
