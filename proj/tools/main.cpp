// Command line front end: simulate paths, inspect spectral measures, run
// pattern prediction, and check the asymptotics empirically. One JSON config
// per invocation; outputs go to --out as CSV and JSON. All runs with the same
// config and seed produce byte-identical files.
//
// Exit codes: 0 success, 2 invalid usage or configuration, 3 model window not
// representable from the observed past, 4 too few threshold exceedances.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stablepath/bivariate.hpp"
#include "stablepath/config.hpp"
#include "stablepath/errors.hpp"
#include "stablepath/model.hpp"
#include "stablepath/montecarlo.hpp"
#include "stablepath/seminorm.hpp"
#include "stablepath/spectral.hpp"
#include "stablepath/stable.hpp"
#include "stablepath/tailcond.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace stablepath;

namespace {

// shortest decimal form that parses back to the same double
std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw InvalidParameter("cannot write output file: " + p.string());
  out << text;
}

void write_doc(const fs::path& p, const json& doc) {
  write_text(p, doc.dump(2) + "\n");
}

json atom_to_json(const Atom& a) {
  return json{{"point", a.point},
              {"weight", a.weight},
              {"theta", a.theta},
              {"j", a.j},
              {"k", a.k}};
}

json measure_to_json(const DiscreteSpectralMeasure& mes,
                     const std::string& support) {
  json atoms = json::array();
  double mass = 0.0;
  for (const auto& a : mes.atoms()) {
    atoms.push_back(atom_to_json(a));
    mass += a.weight;
  }
  return json{{"support", support},
              {"dimension", mes.dimension()},
              {"alpha", mes.alpha()},
              {"atoms", std::move(atoms)},
              {"total_mass", mass}};
}

std::string measure_to_csv(const DiscreteSpectralMeasure& mes) {
  std::string out = "theta,j,k,weight";
  for (int c = 0; c < mes.dimension(); ++c)
    out += ",p" + std::to_string(c);
  out += "\n";
  for (const auto& a : mes.atoms()) {
    out += std::to_string(a.theta) + "," + std::to_string(a.j) + "," +
           std::to_string(a.k) + "," + fmt(a.weight);
    for (double v : a.point) out += "," + fmt(v);
    out += "\n";
  }
  return out;
}

void write_meta(const fs::path& dir, const std::string& command,
                const std::vector<std::string>& outputs,
                std::optional<long long> seed) {
  json meta{{"command", command}, {"outputs", outputs}};
  if (seed.has_value()) meta["seed"] = *seed;
  write_doc(dir / "meta.json", meta);
}

long long effective_seed(const json& run, const std::string& ctx,
                         std::optional<long long> cli_seed) {
  if (cli_seed.has_value()) return *cli_seed;
  return cfg::get_integer_or(run, ctx, "seed", 0);
}

const json& run_block(const json& root) {
  cfg::check_fields(root, "config", {"model", "seminorm", "run"});
  const json& run = cfg::need(root, "config", "run");
  if (!run.is_object()) throw InvalidParameter("run must be an object");
  return run;
}

std::vector<std::size_t> atoms_for_labels(
    const DiscreteSpectralMeasure& mes,
    const std::vector<cfg::AtomLabel>& labels, const std::string& what) {
  std::vector<std::size_t> out;
  for (const auto& l : labels)
    for (std::size_t i = 0; i < mes.atoms().size(); ++i) {
      const Atom& a = mes.atoms()[i];
      if (a.theta == l.theta && a.j == l.j && a.k == l.k) out.push_back(i);
    }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty())
    throw InvalidParameter("run." + what +
                           " matches no atom of the spectral measure");
  return out;
}

DiscreteSpectralMeasure cylinder_measure(const Aggregate& agg,
                                         const cfg::WindowSpec& ws,
                                         const TruncationPolicy& trunc) {
  Representability rep = is_past_representable(agg, ws.m, ws.h);
  if (!rep.yes)
    throw NotRepresentable(
        "model window is not representable from the observed past: " +
        rep.reason);
  auto euclid = euclidean_spectral_measure(agg, ws.m, ws.h, trunc);
  return to_cylinder(euclid, SemiNorm(ws.m, ws.h, ws.p));
}

int cmd_simulate(const json& root, const fs::path& out,
                 std::optional<long long> cli_seed) {
  const json& run = run_block(root);
  cfg::check_fields(run, "run", {"length", "seed", "tol", "max_terms"});
  Aggregate agg = cfg::aggregate_from_config(root);
  cfg::window_from_config(root);
  long long length = cfg::get_integer(run, "run", "length");
  if (length < 1) throw InvalidParameter("run.length must be positive");
  long long seed = effective_seed(run, "run", cli_seed);
  TruncationPolicy pol = cfg::truncation_from_run(run, "run");

  auto res = simulate(agg, static_cast<std::size_t>(length), pol,
                      static_cast<std::uint64_t>(seed));
  std::string csv = "t,X_t\n";
  for (std::size_t t = 0; t < res.x.size(); ++t)
    csv += std::to_string(t) + "," + fmt(res.x[t]) + "\n";
  write_text(out / "series.csv", csv);
  write_meta(out, "simulate", {"series.csv"}, seed);
  return 0;
}

int cmd_spectral(const json& root, const fs::path& out,
                 std::optional<long long>) {
  const json& run = run_block(root);
  cfg::check_fields(run, "run", {"representation", "tol", "max_terms"});
  Aggregate agg = cfg::aggregate_from_config(root);
  cfg::WindowSpec ws = cfg::window_from_config(root);
  std::string repF = cfg::get_string(run, "run", "representation");
  if (repF != "cylinder" && repF != "euclidean")
    throw InvalidParameter(
        "run.representation must be \"cylinder\" or \"euclidean\"");
  TruncationPolicy trunc = cfg::truncation_from_run(run, "run");

  Representability verdict = is_past_representable(agg, ws.m, ws.h);
  json doc;
  if (repF == "cylinder") {
    auto mes = cylinder_measure(agg, ws, trunc);
    doc = measure_to_json(mes, "cylinder");
    write_text(out / "spectral.csv", measure_to_csv(mes));
  } else {
    auto mes = euclidean_spectral_measure(agg, ws.m, ws.h, trunc);
    doc = measure_to_json(mes, "euclidean");
    write_text(out / "spectral.csv", measure_to_csv(mes));
  }
  doc["representable"] = verdict.yes;
  doc["representability_reason"] = verdict.reason;
  json m0s = json::array();
  for (std::size_t j = 0; j < agg.components().size(); ++j) {
    M0Result m0 = compute_m0(agg.components()[j].seq);
    m0s.push_back(json{{"component", j + 1},
                       {"finite", m0.finite},
                       {"value", m0.value}});
  }
  doc["m0"] = std::move(m0s);
  write_doc(out / "spectral.json", doc);
  write_meta(out, "spectral", {"spectral.json", "spectral.csv"}, {});
  return 0;
}

int cmd_predict(const json& root, const fs::path& out,
                std::optional<long long>) {
  const json& run = run_block(root);
  cfg::check_fields(run, "run", {"observed", "match_tol", "tol", "max_terms"});
  Aggregate agg = cfg::aggregate_from_config(root);
  cfg::WindowSpec ws = cfg::window_from_config(root);
  std::vector<double> observed = cfg::get_number_array(run, "run", "observed");
  if (observed.size() != static_cast<std::size_t>(ws.m) + 1)
    throw InvalidParameter(
        "run.observed must contain exactly m+1 values (the observed block)");
  double match_tol = cfg::get_number_or(run, "run", "match_tol", 1e-6);
  if (!(match_tol > 0.0))
    throw InvalidParameter("run.match_tol must be positive");
  TruncationPolicy trunc = cfg::truncation_from_run(run, "run");

  SemiNorm sn(ws.m, ws.h, ws.p);
  auto dists = predict(agg, sn, observed, match_tol, trunc);

  json classes = json::array();
  std::string csv = "class,theta,j,k,probability";
  for (int c = 0; c < ws.h; ++c) csv += ",f" + std::to_string(c + 1);
  csv += "\n";
  for (std::size_t ci = 0; ci < dists.size(); ++ci) {
    json entries = json::array();
    for (const auto& e : dists[ci].entries) {
      entries.push_back(json{{"theta", e.atom.theta},
                             {"j", e.atom.j},
                             {"k", e.atom.k},
                             {"probability", e.probability},
                             {"point", e.atom.point}});
      csv += std::to_string(ci) + "," + std::to_string(e.atom.theta) + "," +
             std::to_string(e.atom.j) + "," + std::to_string(e.atom.k) + "," +
             fmt(e.probability);
      for (int c = 0; c < ws.h; ++c)
        csv += "," + fmt(e.atom.point[static_cast<std::size_t>(ws.m + 1 + c)]);
      csv += "\n";
    }
    classes.push_back(json{{"conditioning", dists[ci].conditioning},
                           {"entries", std::move(entries)}});
  }
  write_doc(out / "prediction.json", json{{"classes", std::move(classes)}});
  write_text(out / "prediction.csv", csv);
  write_meta(out, "predict", {"prediction.json", "prediction.csv"}, {});
  return 0;
}

int cmd_verify(const json& root, const fs::path& out,
               std::optional<long long> cli_seed) {
  const json& run = run_block(root);
  std::string experiment = cfg::get_string(run, "run", "experiment");
  Aggregate agg = cfg::aggregate_from_config(root);
  cfg::WindowSpec ws = cfg::window_from_config(root);
  SemiNorm sn(ws.m, ws.h, ws.p);

  if (experiment == "conditional") {
    cfg::check_fields(run, "run",
                      {"experiment", "N", "seed", "quantile", "tube_radius",
                       "conditioning", "target", "tol", "max_terms"});
    TruncationPolicy trunc = cfg::truncation_from_run(run, "run");
    auto cyl = cylinder_measure(agg, ws, trunc);
    double radius = cfg::get_number_or(run, "run", "tube_radius", 0.05);
    auto cond = atoms_for_labels(
        cyl, cfg::labels_from_config(run, "run", "conditioning"),
        "conditioning");
    auto target = atoms_for_labels(
        cyl, cfg::labels_from_config(run, "run", "target"), "target");

    TailExperiment exp;
    exp.model = &agg;
    exp.sn = sn;
    exp.B = tube_predicate(cyl, cond, radius);
    exp.A = tube_predicate(cyl, target, radius);
    exp.quantile = cfg::get_number(run, "run", "quantile");
    exp.N = cfg::get_integer(run, "run", "N");
    long long seed = effective_seed(run, "run", cli_seed);
    auto res = empirical_conditional(exp, static_cast<std::uint64_t>(seed));

    // mass ratio of the same tubes under the spectral measure
    double num = 0.0, den = 0.0;
    for (std::size_t i : cond) den += cyl.atoms()[i].weight;
    for (std::size_t i : target)
      if (std::find(cond.begin(), cond.end(), i) != cond.end())
        num += cyl.atoms()[i].weight;
    json doc{{"estimate", res.estimate},
             {"std_error", res.std_error},
             {"n_exceedances", res.n_exceedances},
             {"quantile", exp.quantile},
             {"N", exp.N},
             {"theory", den > 0.0 ? num / den : 0.0}};
    write_doc(out / "verify.json", doc);
    write_meta(out, "verify", {"verify.json"}, seed);
    return 0;
  }

  if (experiment == "scaling") {
    cfg::check_fields(run, "run",
                      {"experiment", "N", "seed", "quantiles", "tube_radius",
                       "target", "tol", "max_terms"});
    TruncationPolicy trunc = cfg::truncation_from_run(run, "run");
    auto cyl = cylinder_measure(agg, ws, trunc);
    double radius = cfg::get_number_or(run, "run", "tube_radius", 0.05);
    auto quantiles = cfg::get_number_array(run, "run", "quantiles");
    long long N = cfg::get_integer(run, "run", "N");
    long long seed = effective_seed(run, "run", cli_seed);

    const json& tgt = cfg::need(run, "run", "target");
    std::function<bool(std::span<const double>)> pred;
    double mass = 0.0;
    if (tgt.is_string() && tgt.get<std::string>() == "all") {
      pred = [](std::span<const double>) { return true; };
      for (const auto& a : cyl.atoms()) mass += a.weight;
    } else if (tgt.is_array()) {
      auto idx = atoms_for_labels(
          cyl, cfg::labels_from_config(run, "run", "target"), "target");
      pred = tube_predicate(cyl, idx, radius);
      for (std::size_t i : idx) mass += cyl.atoms()[i].weight;
    } else {
      throw InvalidParameter(
          "run.target must be \"all\" or an array of atom labels");
    }

    auto pts = empirical_scaling_at_quantiles(
        agg, sn, pred, quantiles, N, static_cast<std::uint64_t>(seed));
    json points = json::array();
    for (const auto& p : pts)
      points.push_back(json{{"x", p.x},
                            {"estimate", p.estimate},
                            {"std_error", p.std_error},
                            {"lo", p.estimate - 3.0 * p.std_error},
                            {"hi", p.estimate + 3.0 * p.std_error}});
    json doc{{"points", std::move(points)},
             {"theory", c_alpha(agg.alpha()) * mass}};
    write_doc(out / "scaling.json", doc);
    write_meta(out, "verify", {"scaling.json"}, seed);
    return 0;
  }

  throw InvalidParameter(
      "run.experiment must be \"conditional\" or \"scaling\"");
}

int cmd_bivariate(const json& root, const fs::path& out,
                  std::optional<long long>) {
  cfg::check_fields(root, "config", {"bivariate"});
  cfg::BivarConfig bc = cfg::bivariate_from_config(root);
  BivarModel model(bc.alpha, bc.rho1, bc.rho2, bc.gamma2);
  Gamma4Measure g4 = gamma4_cylinder(model);

  json cases = json::array();
  for (const auto& nr : bc.regions) {
    double value = bivar_tail(model, bc.v0, nr.region);
    cases.push_back(json{{"name", nr.name}, {"value", value}});
  }
  json doc{{"cases", std::move(cases)},
           {"gamma4", measure_to_json(g4.combined, "cylinder")},
           {"sigma1_alpha", model.sigma1_alpha()},
           {"sigma2_alpha", model.sigma2_alpha()}};
  write_doc(out / "bivariate.json", doc);
  write_meta(out, "bivariate", {"bivariate.json"}, {});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"alpha-stable moving average paths: simulation, spectral "
               "measures, pattern prediction, and empirical verification"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  long long seed_value = 0;
  struct Sub {
    const char* name;
    const char* help;
    int (*fn)(const json&, const fs::path&, std::optional<long long>);
  };
  const Sub subs[] = {
      {"simulate", "simulate a path and write series.csv", cmd_simulate},
      {"spectral", "write the spectral measure of the path window", cmd_spectral},
      {"predict", "conditional distribution of the coming path", cmd_predict},
      {"verify", "empirical check of the tail asymptotics", cmd_verify},
      {"bivariate", "closed forms for the bivariate accumulated model",
       cmd_bivariate},
  };
  for (const Sub& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--config", config_path, "JSON configuration file")
        ->required();
    sub->add_option("--out", out_path, "output directory")->required();
    sub->add_option("--seed", seed_value, "override the configured seed");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    std::optional<long long> cli_seed;
    if (sub->count("--seed") > 0) cli_seed = seed_value;

    json root = cfg::load_file(config_path);
    if (!root.is_object())
      throw InvalidParameter("config root must be a JSON object");
    fs::path out(out_path);
    fs::create_directories(out);

    for (const Sub& s : subs)
      if (sub->get_name() == s.name) return s.fn(root, out, cli_seed);
    return 2;
  } catch (const NotRepresentable& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const TooFewExceedances& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
