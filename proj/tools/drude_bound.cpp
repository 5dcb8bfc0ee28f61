// drude_bound: command-line front end for the XXZ charge and Drude-bound library.

#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "xxz.hpp"

namespace {

using nlohmann::json;
using xxz::CsvTable;

struct RunConfig {
  std::string subcommand;
  std::optional<int> l, m;
  double delta = 0.5;
  double chi = 0.0;
  std::optional<int> k_max;
  int d_max = 6;
  int n = 8;
  double beta = 0.0;
  double t_max = 50.0;
  double dt = 0.1;
  std::string task = "autocorr";
  std::string out;
  std::string format = "json";
  std::uint64_t seed = 0;

  json to_json() const {
    json j = {{"subcommand", subcommand}, {"delta", delta},   {"chi", chi},
              {"d_max", d_max},           {"n", n},           {"beta", beta},
              {"t_max", t_max},           {"dt", dt},         {"task", task},
              {"format", format},         {"seed", seed}};
    j["l"] = l ? json(*l) : json(nullptr);
    j["m"] = m ? json(*m) : json(nullptr);
    j["k_max"] = k_max ? json(*k_max) : json(nullptr);
    return j;
  }
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json envelope(const RunConfig& cfg) {
  return {{"tool", "drude_bound"}, {"version", std::string(xxz::kVersion)}, {"config", cfg.to_json()}};
}

// CSV artifacts carry the envelope as leading comment lines.
void emit(const RunConfig& cfg, const json& doc, const CsvTable* table) {
  std::ostringstream os;
  if (cfg.format == "csv") {
    if (!table) throw UsageError("this subcommand has no CSV table; use --format json");
    os << "# " << envelope(cfg).dump() << '\n';
    table->write(os);
  } else {
    json full = envelope(cfg);
    full["result"] = doc;
    os << full.dump(2) << '\n';
  }
  if (cfg.out.empty()) {
    std::cout << os.str();
  } else {
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) throw UsageError("cannot open output file " + cfg.out);
    f << os.str();
  }
}

xxz::ResonantAnisotropy require_resonance(const RunConfig& cfg) {
  if (!cfg.l || !cfg.m) throw UsageError("--l and --m are required");
  return xxz::ResonantAnisotropy(*cfg.l, *cfg.m);
}

// Boundary support of [H_n, Q_n] at two chain lengths; the blocks must sit
// within k + 1 sites of each end and agree after shifting the right block.
json boundary_verdict(const xxz::ChargeEntry& e, const xxz::LocalOperator& h) {
  int k = e.q.width();
  int n1 = 2 * k + 2, n2 = n1 + 2;
  auto c1 = xxz::boundary_commutator(e.q, n1, h);
  auto c2 = xxz::boundary_commutator(e.q, n2, h);
  auto s1 = xxz::split_boundary(c1, n1, k + 1);
  auto s2 = xxz::split_boundary(c2, n2, k + 1);
  bool support = s1.bulk.empty() && s2.bulk.empty();
  bool stable = xxz::approx_equal(s1.left, s2.left, 1e-10) &&
                xxz::approx_equal(s1.right, s2.right, 1e-10);
  return {{"k", e.k}, {"boundary_width", k + 1}, {"support_ok", support}, {"n_independent", stable}};
}

int cmd_charges(const RunConfig& cfg) {
  if (!cfg.k_max || *cfg.k_max < 2) throw UsageError("--kmax must be at least 2");
  auto seq = xxz::generate_charges({cfg.delta, cfg.chi}, *cfg.k_max);
  auto h = xxz::hamiltonian_density({cfg.delta, cfg.chi});
  json entries = json::array(), verdicts = json::array();
  CsvTable table{{"k", "kind", "operator"}, {}};
  for (const auto& e : seq.entries) {
    entries.push_back({{"k", e.k},
                       {"delta", cfg.delta},
                       {"q", xxz::operator_to_json(e.q.density())},
                       {"p", xxz::operator_to_json(e.p.density())}});
    if (e.k >= 2) verdicts.push_back(boundary_verdict(e, h));
    table.rows.push_back({static_cast<long long>(e.k), std::string("q"),
                          xxz::serialize_operator(e.q.density())});
    table.rows.push_back({static_cast<long long>(e.k), std::string("p"),
                          xxz::serialize_operator(e.p.density())});
  }
  emit(cfg, {{"charges", entries}, {"boundary", verdicts}}, &table);
  return 0;
}

int cmd_zcharge(const RunConfig& cfg) {
  auto res = require_resonance(cfg);
  auto dens = xxz::zcharge_densities(res, cfg.d_max);
  auto norms = xxz::zcharge_hs_norms(res, cfg.d_max);
  json list = json::array();
  CsvTable table{{"d", "hs_norm", "terms"}, {}};
  for (const auto& [d, q] : dens.by_order) {
    double nrm = norms[static_cast<std::size_t>(d - 2)];
    list.push_back({{"d", d}, {"op", xxz::operator_to_json(q)}, {"hs_norm", nrm}});
    table.rows.push_back({static_cast<long long>(d), nrm, static_cast<long long>(q.size())});
  }
  json doc = {{"l", res.l()}, {"m", res.m()}, {"delta", res.delta()}, {"d_max", cfg.d_max},
              {"densities", list}};
  try {
    auto fit = xxz::fit_norm_decay(norms);
    doc["xi_fit"] = fit.xi;
    doc["gamma_fit"] = fit.gamma;
  } catch (const xxz::DegenerateFit& e) {
    doc["xi_fit"] = nullptr;
    doc["gamma_fit"] = nullptr;
    doc["fit_error"] = e.name();
  }
  emit(cfg, doc, &table);
  return 0;
}

int cmd_drude(const RunConfig& cfg) {
  constexpr int kNMax = 2000;
  auto row = [&](const xxz::ResonantAnisotropy& r) {
    return json{{"l", r.l()},
                {"m", r.m()},
                {"delta", r.delta()},
                {"dz_closed", xxz::dz_closed_form(r)},
                {"dz_numeric", xxz::dz_numeric(r, kNMax)},
                {"four_dz", 4.0 * xxz::dz_closed_form(r)}};
  };
  CsvTable table{{"l", "m", "delta", "dz_closed", "dz_numeric"}, {}};
  json doc;
  std::vector<xxz::ResonantAnisotropy> list;
  if (cfg.l) {
    list.push_back(require_resonance(cfg));
  } else {
    // Fractal profile: every resonance with denominator up to m.
    int m_top = cfg.m.value_or(8);
    for (int m = 2; m <= m_top; ++m)
      for (int l = 1; l < m; ++l)
        if (std::gcd(l, m) == 1) list.emplace_back(l, m);
  }
  json rows = json::array();
  for (const auto& r : list) {
    json j = row(r);
    rows.push_back(j);
    table.rows.push_back({static_cast<long long>(r.l()), static_cast<long long>(r.m()), r.delta(),
                          j["dz_closed"].get<double>(), j["dz_numeric"].get<double>()});
  }
  doc = cfg.l ? rows.front() : json{{"rows", rows}};
  doc["n_max"] = kNMax;
  emit(cfg, doc, &table);
  return 0;
}

int cmd_mazur(const RunConfig& cfg) {
  if (cfg.k_max) {
    if (*cfg.k_max < 2) throw UsageError("--kmax must be at least 2");
    std::optional<xxz::ResonantAnisotropy> res;
    double delta = cfg.delta;
    if (cfg.l || cfg.m) {
      res = require_resonance(cfg);
      delta = res->delta();
    }
    auto seq = xxz::generate_charges({delta, 0.0}, *cfg.k_max);
    auto rep = xxz::mazur_bound_multi(seq, res, cfg.chi, cfg.d_max);
    json ukl = json::array();
    for (Eigen::Index i = 0; i < rep.ukl.rows(); ++i) {
      json r = json::array();
      for (Eigen::Index j = 0; j < rep.ukl.cols(); ++j) r.push_back(rep.ukl(i, j));
      ukl.push_back(r);
    }
    CsvTable table{{"index", "w"}, {}};
    for (std::size_t i = 0; i < rep.wk.size(); ++i) {
      table.rows.push_back({static_cast<long long>(i + 1), rep.wk[i]});
    }
    emit(cfg,
         {{"delta", delta},
          {"chi", cfg.chi},
          {"k_max", *cfg.k_max},
          {"zcharge", res.has_value()},
          {"wk", rep.wk},
          {"ukl", ukl},
          {"bound", rep.bound},
          {"conditioning", rep.conditioning}},
         &table);
    return 0;
  }
  auto res = require_resonance(cfg);
  auto rep = xxz::mazur_bound_zcharge(res, cfg.d_max);
  json conv = json::array();
  CsvTable table{{"d_max", "bound"}, {}};
  for (const auto& [d, b] : rep.convergence) {
    conv.push_back({d, b});
    table.rows.push_back({static_cast<long long>(d), b});
  }
  emit(cfg,
       {{"l", res.l()},
        {"m", res.m()},
        {"d_max", rep.d_max},
        {"w", rep.w},
        {"u", rep.u},
        {"bound", rep.bound},
        {"dz_closed", xxz::dz_closed_form(res)},
        {"dz_numeric", xxz::dz_numeric(res)},
        {"four_dz", 4.0 * xxz::dz_closed_form(res)},
        {"convergence", conv}},
       &table);
  return 0;
}

int cmd_ed(const RunConfig& cfg) {
  namespace ed = xxz::ed;
  xxz::XxzParams params{cfg.delta, cfg.chi};
  if (cfg.task == "sweep") {
    auto res = require_resonance(cfg);
    std::vector<int> ns;
    for (int n = 4; n <= cfg.n; n += 2) ns.push_back(n);
    auto rows = ed::bound_vs_ed_sweep(res, ns, cfg.d_max);
    CsvTable table{{"n", "cbar_n", "half_cbar_n", "window", "window_average", "bound", "four_dz"}, {}};
    json list = json::array();
    for (const auto& r : rows) {
      table.rows.push_back({static_cast<long long>(r.n), r.cbar_n, r.half_cbar_n, r.window,
                            r.window_average, r.bound, r.four_dz});
      list.push_back({{"n", r.n},
                      {"cbar_n", r.cbar_n},
                      {"half_cbar_n", r.half_cbar_n},
                      {"window", r.window},
                      {"window_average", r.window_average},
                      {"bound", r.bound},
                      {"four_dz", r.four_dz}});
    }
    emit(cfg, {{"rows", list}}, &table);
    return 0;
  }
  if (cfg.task == "lightcone" && cfg.n > 12) throw xxz::SizeTooLarge("light-cone scan supports n <= 12");
  auto spec = ed::diagonalize(cfg.n, params);
  if (cfg.task == "autocorr") {
    auto times = ed::time_grid(cfg.t_max, cfg.dt);
    auto r = ed::autocorrelation(spec, cfg.beta, times);
    CsvTable table{{"t", "cn"}, {}};
    for (std::size_t i = 0; i < r.times.size(); ++i) table.rows.push_back({r.times[i], r.cn_values[i]});
    emit(cfg,
         {{"n", r.n},
          {"beta", r.beta},
          {"cn_0", r.cn_values.front()},
          {"cbar_n", r.cbar_n},
          {"window_average", ed::finite_time_average(spec, cfg.beta, cfg.t_max)},
          {"times", r.times},
          {"cn_values", r.cn_values}},
         &table);
  } else if (cfg.task == "suzuki") {
    std::vector<xxz::LocalOperator> conserved{ed::chain_magnetization(cfg.n),
                                              ed::chain_hamiltonian(cfg.n, params)};
    auto r = ed::suzuki_finite_check(spec, conserved, cfg.beta);
    emit(cfg, {{"lhs", r.lhs}, {"rhs", r.rhs}, {"holds", r.holds}}, nullptr);
  } else if (cfg.task == "kubo") {
    auto r = ed::kubo_mori_compare(spec, cfg.beta, cfg.t_max);
    emit(cfg,
         {{"n", r.n},
          {"beta", r.beta},
          {"thermal_dt", r.thermal_dt},
          {"canonical_dt", r.canonical_dt},
          {"gap", r.gap}},
         nullptr);
  } else if (cfg.task == "lightcone") {
    auto z = xxz::LocalOperator::term(xxz::PauliString::single(1, xxz::Pauli::Z));
    std::vector<int> xs;
    for (int x = 1; x < cfg.n; ++x) xs.push_back(x);
    auto times = ed::time_grid(cfg.t_max, cfg.dt);
    auto fit = ed::light_cone_scan(spec, z, z, cfg.beta, times, xs);
    CsvTable table{{"x", "t", "commutator_norm"}, {}};
    for (std::size_t xi = 0; xi < xs.size(); ++xi)
      for (std::size_t ti = 0; ti < times.size(); ++ti)
        table.rows.push_back({static_cast<long long>(xs[xi]), times[ti], fit.commutator_norms[xi][ti]});
    emit(cfg,
         {{"n", cfg.n},
          {"beta", cfg.beta},
          {"fitted_v", fit.fitted_v},
          {"fitted_mu", fit.fitted_mu},
          {"fitted_kappa", fit.fitted_kappa},
          {"fitted_rho", fit.fitted_rho},
          {"distances", fit.distances},
          {"clustering", fit.clustering}},
         &table);
  } else {
    throw UsageError("unknown --task " + cfg.task);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conserved charges and Drude-weight bounds for the XXZ chain"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", cfg.out, "Output file (default stdout)");
    sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--seed", cfg.seed, "Seed echoed into the output");
  };
  auto resonance = [&](CLI::App* sub) {
    sub->add_option("--l", cfg.l, "Resonance numerator l");
    sub->add_option("--m", cfg.m, "Resonance denominator m");
  };

  auto* charges = app.add_subcommand("charges", "Boost-generated local charges");
  charges->add_option("--delta", cfg.delta, "Anisotropy");
  charges->add_option("--chi", cfg.chi, "Field strength");
  charges->add_option("--kmax", cfg.k_max, "Highest charge order (>= 2)");
  common(charges);

  auto* zcharge = app.add_subcommand("zcharge", "Quasi-local Z-charge densities");
  resonance(zcharge);
  zcharge->add_option("--dmax", cfg.d_max, "Highest density order");
  common(zcharge);

  auto* drude = app.add_subcommand("drude", "Transfer-matrix D_Z, single resonance or profile");
  resonance(drude);
  common(drude);

  auto* mazur = app.add_subcommand("mazur", "Mazur bounds at infinite temperature");
  resonance(mazur);
  mazur->add_option("--dmax", cfg.d_max, "Z-charge truncation order");
  mazur->add_option("--kmax", cfg.k_max, "Include boost charges 1..kmax");
  mazur->add_option("--delta", cfg.delta, "Anisotropy for boost charges without --l/--m");
  mazur->add_option("--chi", cfg.chi, "Reduced field beta*chi of the infinite-temperature state");
  common(mazur);

  auto* edc = app.add_subcommand("ed", "Exact diagonalization checks");
  edc->add_option("--n", cfg.n, "Chain length");
  edc->add_option("--delta", cfg.delta, "Anisotropy");
  edc->add_option("--chi", cfg.chi, "Field strength");
  edc->add_option("--beta", cfg.beta, "Inverse temperature");
  edc->add_option("--tmax", cfg.t_max, "Largest time");
  edc->add_option("--dt", cfg.dt, "Time step")->check(CLI::PositiveNumber);
  edc->add_option("--task", cfg.task, "autocorr, suzuki, kubo, lightcone or sweep")
      ->check(CLI::IsMember({"autocorr", "suzuki", "kubo", "lightcone", "sweep"}));
  resonance(edc);
  edc->add_option("--dmax", cfg.d_max, "Z-charge truncation order for the sweep");
  common(edc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  cfg.subcommand = app.get_subcommands().front()->get_name();

  try {
    if (cfg.subcommand == "charges") return cmd_charges(cfg);
    if (cfg.subcommand == "zcharge") return cmd_zcharge(cfg);
    if (cfg.subcommand == "drude") return cmd_drude(cfg);
    if (cfg.subcommand == "mazur") return cmd_mazur(cfg);
    return cmd_ed(cfg);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const xxz::Error& e) {
    std::cerr << "error: " << e.name() << ": " << e.what() << '\n';
    return 1;
  }
}
