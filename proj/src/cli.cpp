#include "ellvol/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string_view>

#include <CLI11.hpp>
#include <json.hpp>

#include "ellvol/asymptotics.hpp"
#include "ellvol/montecarlo.hpp"
#include "ellvol/summation.hpp"

#ifndef ELLVOL_VERSION
#define ELLVOL_VERSION "0.0.0"
#endif

namespace ellvol::cli {

using Json = nlohmann::ordered_json;

namespace {

// --- text helpers ----------------------------------------------------------

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.emplace_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> to_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

template <typename Int>
std::optional<Int> to_integer(std::string_view text) {
  text = trim(text);
  Int value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

double require_double(const std::string& flag, const std::string& text) {
  auto v = to_double(text);
  if (!v || !std::isfinite(*v)) throw UsageError(flag + ": expected a finite number, got '" + text + "'");
  return *v;
}

template <typename Int>
Int require_integer(const std::string& flag, const std::string& text) {
  auto v = to_integer<Int>(text);
  if (!v) throw UsageError(flag + ": expected a non-negative integer, got '" + text + "'");
  return *v;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// JSON has no infinities: encode them as the strings "inf" / "-inf".
Json num(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

Json num(const std::optional<double>& v) { return v ? num(*v) : Json(nullptr); }

std::vector<double> parse_value_list(const std::string& what, std::string_view text) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) {
    auto v = to_double(item);
    if (!v) throw DomainError(what + ": cannot parse '" + item + "'");
    out.push_back(*v);
  }
  return out;
}

}  // namespace

// --- names -----------------------------------------------------------------

std::string to_string(Command c) {
  switch (c) {
    case Command::constants: return "constants";
    case Command::spectrum: return "spectrum";
    case Command::volume: return "volume";
    case Command::scan: return "scan";
    case Command::clt: return "clt";
    case Command::asymptotics: return "asymptotics";
  }
  return "unknown";
}

std::string to_string(Lemma l) {
  switch (l) {
    case Lemma::factorial: return "factorial";
    case Lemma::sum_power_log: return "sum-power-log";
    case Lemma::log_pow: return "log-pow";
    case Lemma::prod_log: return "prod-log";
  }
  return "unknown";
}

// --- family specs and axes files -------------------------------------------

SpectrumFamily parse_family(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw DomainError("family '" + text + "' lacks a '<kind>:' prefix");
  }
  const std::string kind(trim(std::string_view(text).substr(0, colon)));
  const std::string body = text.substr(colon + 1);
  if (kind == "constant") {
    auto c = to_double(body);
    if (!c) throw DomainError("constant: cannot parse '" + body + "'");
    return SpectrumFamily(ConstantAxes{*c});
  }
  if (kind == "periodic") {
    EventuallyPeriodicAxes ep;
    const auto semi = body.find(';');
    ep.period = parse_value_list("periodic", std::string_view(body).substr(0, semi));
    if (semi != std::string::npos) {
      const std::string rest(trim(std::string_view(body).substr(semi + 1)));
      if (rest.rfind("head=", 0) != 0) throw DomainError("periodic: expected ';head=<u1,...>'");
      ep.head = parse_value_list("periodic head", std::string_view(rest).substr(5));
    }
    return SpectrumFamily(std::move(ep));
  }
  if (kind == "powerlog") {
    const auto values = parse_value_list("powerlog", body);
    if (values.size() != 2) throw DomainError("powerlog: expected '<alpha>,<beta>'");
    return SpectrumFamily(PowerLogAxes{values[0], values[1]});
  }
  if (kind == "file") {
    const std::string path(trim(body));
    if (path.empty()) throw DomainError("file: missing path");
    return SpectrumFamily::from_row(load_axes_file(path), "file:" + path);
  }
  throw DomainError("unknown family kind '" + kind + "'");
}

SemiAxesRow load_axes_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open axes file '" + path + "'");
  std::vector<double> axes;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view content(line);
    if (const auto hash = content.find('#'); hash != std::string_view::npos) {
      content = content.substr(0, hash);
    }
    content = trim(content);
    if (content.empty()) continue;
    auto v = to_double(content);
    if (!v || !std::isfinite(*v) || !(*v > 0.0)) {
      throw DomainError(path + ":" + std::to_string(line_no) + ": expected a positive number, got '" +
                        std::string(content) + "'");
    }
    if (axes.size() == kMaxAxesFromFile) {
      throw DomainError(path + ": more than " + std::to_string(kMaxAxesFromFile) + " axes");
    }
    axes.push_back(*v);
  }
  if (in.bad()) throw IoError("error while reading '" + path + "'");
  if (axes.empty()) throw DomainError(path + ": no semi-axes found");
  return SemiAxesRow::from_axes(axes);
}

// --- argument parsing ------------------------------------------------------

RunConfig parse_args(const std::vector<std::string>& args) {
  CLI::App app{"Threshold and CLT toolkit for volumes of p-ellipsoid intersections", "ellvol"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", ELLVOL_VERSION);

  struct Raw {
    std::string p, q, n, t, t_min, t_max, t_steps, family, axes_file, samples, seed, workers,
        format, output, emit, lemma, alpha, beta, terms, n_grid;
  } raw;

  auto opt = [](CLI::App* sub, const std::string& name, std::string& target,
                const std::string& help) {
    sub->add_option(name, target, help)->multi_option_policy(CLI::MultiOptionPolicy::Throw);
  };
  auto add_output = [&](CLI::App* sub) {
    opt(sub, "--format", raw.format, "json (default) or csv");
    opt(sub, "--output", raw.output, "write to this file instead of standard output");
  };
  auto add_family = [&](CLI::App* sub) {
    opt(sub, "--family", raw.family,
        "constant:<c> | periodic:<v1,...>[;head=<u1,...>] | powerlog:<alpha>,<beta> | file:<path>");
    opt(sub, "--axes-file", raw.axes_file, "semi-axes file, one positive value per line");
    opt(sub, "--n", raw.n, "dimension (defaults to the file's line count)");
  };
  auto add_mc = [&](CLI::App* sub) {
    opt(sub, "--samples", raw.samples, "Monte Carlo sample count");
    opt(sub, "--seed", raw.seed, "64-bit seed (default 0)");
    opt(sub, "--workers", raw.workers, "worker threads (default 1); output does not depend on it");
  };

  auto* constants = app.add_subcommand("constants", "moments, A_{p,q}, radii");
  opt(constants, "--p", raw.p, "exponent p (number or inf)");
  opt(constants, "--q", raw.q, "exponent q");
  opt(constants, "--n", raw.n, "dimension for the radii (default 100)");
  add_output(constants);

  auto* spectrum = app.add_subcommand("spectrum", "finite-n spectrum functionals and limits");
  opt(spectrum, "--p", raw.p, "comma-separated exponents (default 1,2,inf)");
  opt(spectrum, "--q", raw.q, "exponent q");
  add_family(spectrum);
  add_output(spectrum);

  auto* volume = app.add_subcommand("volume", "Monte Carlo intersection volume at one t");
  opt(volume, "--p", raw.p, "exponent p (number or inf)");
  opt(volume, "--q", raw.q, "exponent q");
  opt(volume, "--t", raw.t, "dilation t >= 0");
  add_family(volume);
  add_mc(volume);
  add_output(volume);

  auto* scan = app.add_subcommand("scan", "intersection volume along a t grid (shared samples)");
  opt(scan, "--p", raw.p, "exponent p (number or inf)");
  opt(scan, "--q", raw.q, "exponent q");
  opt(scan, "--t-min", raw.t_min, "first grid point (> 0)");
  opt(scan, "--t-max", raw.t_max, "last grid point");
  opt(scan, "--t-steps", raw.t_steps, "number of grid points (default 31)");
  add_family(scan);
  add_mc(scan);
  add_output(scan);

  auto* clt = app.add_subcommand("clt", "samples of the normalized q-norm statistic");
  opt(clt, "--p", raw.p, "exponent p (number or inf)");
  opt(clt, "--q", raw.q, "exponent q");
  opt(clt, "--emit", raw.emit, "summary (default) or samples");
  add_family(clt);
  add_mc(clt);
  add_output(clt);

  auto* asym = app.add_subcommand("asymptotics", "exact sums against their asymptotic predictors");
  opt(asym, "--lemma", raw.lemma, "factorial | sum-power-log | log-pow | prod-log");
  opt(asym, "--alpha", raw.alpha, "alpha (factorial, sum-power-log)");
  opt(asym, "--beta", raw.beta, "beta (sum-power-log, log-pow)");
  opt(asym, "--terms", raw.terms, "expansion terms for log-pow (default 3)");
  opt(asym, "--n-grid", raw.n_grid, "comma-separated n values (default 10,100,...,1000000)");
  add_output(asym);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    std::ostringstream out, err;
    app.exit(e, out, err);
    throw HelpRequested(out.str());
  } catch (const CLI::CallForVersion& e) {
    throw HelpRequested(std::string(ELLVOL_VERSION) + "\n");
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  RunConfig cfg;
  CLI::App* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();
  if (name == "constants") cfg.command = Command::constants;
  else if (name == "spectrum") cfg.command = Command::spectrum;
  else if (name == "volume") cfg.command = Command::volume;
  else if (name == "scan") cfg.command = Command::scan;
  else if (name == "clt") cfg.command = Command::clt;
  else cfg.command = Command::asymptotics;

  const bool needs_family = cfg.command == Command::spectrum || cfg.command == Command::volume ||
                            cfg.command == Command::scan || cfg.command == Command::clt;

  // p
  if (cfg.command != Command::asymptotics) {
    std::string p_text = raw.p;
    if (p_text.empty()) {
      if (cfg.command != Command::spectrum) throw UsageError("--p is required");
      p_text = "1,2,inf";
    }
    for (const auto& item : split(p_text, ',')) {
      try {
        cfg.p.push_back(Exponent::parse(item));
      } catch (const DomainError&) {
        throw UsageError("--p: expected a positive number or 'inf', got '" + item + "'");
      }
    }
    if (cfg.command != Command::spectrum && cfg.p.size() != 1) {
      throw UsageError("--p takes a single value for " + name);
    }
    if (raw.q.empty()) throw UsageError("--q is required");
    cfg.q = require_double("--q", raw.q);
    if (!(*cfg.q > 0.0)) throw UsageError("--q must be positive");
  }

  if (!raw.n.empty()) {
    cfg.n = require_integer<std::size_t>("--n", raw.n);
    if (*cfg.n == 0) throw UsageError("--n must be >= 1");
  }

  if (cfg.command == Command::constants && !cfg.n) cfg.n = 100;

  if (needs_family) {
    if (!raw.family.empty()) cfg.family = raw.family;
    if (!raw.axes_file.empty()) cfg.axes_file = raw.axes_file;
    if (cfg.family && cfg.axes_file) throw UsageError("give either --family or --axes-file, not both");
    if (!cfg.family && !cfg.axes_file) throw UsageError("one of --family or --axes-file is required");
    const bool from_file = cfg.axes_file || cfg.family->rfind("file:", 0) == 0;
    if (cfg.family && !from_file) {
      try {
        (void)parse_family(*cfg.family);
      } catch (const std::exception& e) {
        throw UsageError(std::string("--family: ") + e.what());
      }
    }
    if (!from_file && !cfg.n) throw UsageError("--n is required for this family");
  }

  if (cfg.command == Command::volume) {
    if (raw.t.empty()) throw UsageError("--t is required");
    cfg.t = require_double("--t", raw.t);
    if (*cfg.t < 0.0) throw UsageError("--t must be >= 0");
  }

  if (cfg.command == Command::scan) {
    if (raw.t_min.empty() || raw.t_max.empty()) throw UsageError("--t-min and --t-max are required");
    cfg.t_min = require_double("--t-min", raw.t_min);
    cfg.t_max = require_double("--t-max", raw.t_max);
    if (!raw.t_steps.empty()) cfg.t_steps = require_integer<unsigned>("--t-steps", raw.t_steps);
    if (cfg.t_steps == 0) throw UsageError("--t-steps must be >= 1");
    if (!(*cfg.t_min > 0.0)) throw UsageError("--t-min must be positive");
    if (cfg.t_steps > 1 && !(*cfg.t_max > *cfg.t_min)) {
      throw UsageError("--t-max must exceed --t-min");
    }
  }

  if (!raw.samples.empty()) cfg.samples = require_integer<std::uint64_t>("--samples", raw.samples);
  if (!raw.seed.empty()) cfg.seed = require_integer<std::uint64_t>("--seed", raw.seed);
  if (!raw.workers.empty()) cfg.workers = require_integer<unsigned>("--workers", raw.workers);
  if (cfg.samples < (cfg.command == Command::clt ? 2u : 1u)) {
    throw UsageError("--samples is too small");
  }
  if (cfg.workers == 0) throw UsageError("--workers must be >= 1");

  if (!raw.emit.empty()) {
    if (raw.emit == "summary") cfg.emit = Emit::summary;
    else if (raw.emit == "samples") cfg.emit = Emit::samples;
    else throw UsageError("--emit: expected 'summary' or 'samples'");
  }

  if (cfg.command == Command::asymptotics) {
    if (raw.lemma.empty()) throw UsageError("--lemma is required");
    if (raw.lemma == "factorial") cfg.lemma = Lemma::factorial;
    else if (raw.lemma == "sum-power-log") cfg.lemma = Lemma::sum_power_log;
    else if (raw.lemma == "log-pow") cfg.lemma = Lemma::log_pow;
    else if (raw.lemma == "prod-log") cfg.lemma = Lemma::prod_log;
    else throw UsageError("--lemma: unknown lemma '" + raw.lemma + "'");
    if (!raw.alpha.empty()) cfg.alpha = require_double("--alpha", raw.alpha);
    if (!raw.beta.empty()) cfg.beta = require_double("--beta", raw.beta);
    if (!raw.terms.empty()) cfg.terms = require_integer<unsigned>("--terms", raw.terms);
    if (cfg.terms == 0) throw UsageError("--terms must be >= 1");
    if (cfg.lemma == Lemma::log_pow && cfg.beta == 0.0) {
      throw UsageError("--beta must be nonzero for log-pow");
    }
    if (raw.n_grid.empty()) {
      cfg.n_grid = {10, 100, 1000, 10000, 100000, 1000000};
    } else {
      for (const auto& item : split(raw.n_grid, ',')) {
        const auto v = require_integer<std::size_t>("--n-grid", item);
        if (v < 2) throw UsageError("--n-grid values must be >= 2");
        cfg.n_grid.push_back(v);
      }
    }
  }

  if (!raw.format.empty()) {
    if (raw.format == "json") cfg.format = Format::json;
    else if (raw.format == "csv") cfg.format = Format::csv;
    else throw UsageError("--format: expected 'json' or 'csv'");
  }
  if (cfg.format == Format::csv) {
    const bool csv_ok = cfg.command == Command::scan || cfg.command == Command::asymptotics ||
                        (cfg.command == Command::clt && cfg.emit == Emit::samples);
    if (!csv_ok) throw UsageError("csv output is not available for " + name);
  }
  if (!raw.output.empty()) cfg.output = raw.output;
  return cfg;
}

// --- execution -------------------------------------------------------------

namespace {

struct Source {
  SpectrumFamily family;
  std::size_t n;
};

// File-backed rows default n to the number of axes in the file.
Source resolve_source(const RunConfig& cfg) {
  std::optional<std::string> path = cfg.axes_file;
  if (!path && cfg.family->rfind("file:", 0) == 0) path = std::string(trim(cfg.family->substr(5)));
  if (!path) return {parse_family(*cfg.family), *cfg.n};
  SemiAxesRow row = load_axes_file(*path);
  const std::size_t n = cfg.n.value_or(row.size());
  if (n > row.size()) {
    throw DomainError("--n " + std::to_string(n) + " exceeds the " + std::to_string(row.size()) +
                      " axes in '" + *path + "'");
  }
  return {SpectrumFamily::from_row(std::move(row), "file:" + *path), n};
}

std::optional<FamilyLimits> limits_for(const SpectrumFamily& family, const Exponent& p, double q) {
  if (family.is_explicit()) return std::nullopt;
  return family_limits(family, p, q);
}

Json limits_json(const std::optional<FamilyLimits>& lim) {
  if (!lim) return nullptr;
  Json j;
  j["F"] = num(lim->F);
  j["G"] = num(lim->G);
  j["z"] = num(lim->z);
  j["threshold_ok"] = lim->threshold_ok;
  j["clt_ok"] = lim->clt_ok;
  return j;
}

Json config_json(const RunConfig& cfg) {
  Json c;
  c["command"] = to_string(cfg.command);
  if (cfg.command == Command::spectrum) {
    Json ps = Json::array();
    for (const auto& p : cfg.p) ps.push_back(p.to_string());
    c["p"] = ps;
  } else if (!cfg.p.empty()) {
    c["p"] = cfg.p.front().to_string();
  }
  if (cfg.q) c["q"] = *cfg.q;
  if (cfg.n) c["n"] = *cfg.n;
  if (cfg.t) c["t"] = *cfg.t;
  if (cfg.command == Command::scan) {
    c["t_min"] = *cfg.t_min;
    c["t_max"] = *cfg.t_max;
    c["t_steps"] = cfg.t_steps;
  }
  if (cfg.family) c["family"] = *cfg.family;
  if (cfg.axes_file) c["axes_file"] = *cfg.axes_file;
  const bool mc = cfg.command == Command::volume || cfg.command == Command::scan ||
                  cfg.command == Command::clt;
  if (mc) {
    c["samples"] = cfg.samples;
    c["seed"] = cfg.seed;
    c["workers"] = cfg.workers;
  }
  if (cfg.command == Command::clt) c["emit"] = cfg.emit == Emit::samples ? "samples" : "summary";
  if (cfg.command == Command::asymptotics) {
    c["lemma"] = to_string(cfg.lemma);
    c["alpha"] = cfg.alpha;
    c["beta"] = cfg.beta;
    c["terms"] = cfg.terms;
    c["n_grid"] = cfg.n_grid;
  }
  c["format"] = cfg.format == Format::csv ? "csv" : "json";
  if (cfg.output) c["output"] = *cfg.output;
  return c;
}

std::string document(const RunConfig& cfg, Json result) {
  Json doc;
  doc["command"] = to_string(cfg.command);
  doc["config"] = config_json(cfg);
  doc["result"] = std::move(result);
  doc["version"] = ELLVOL_VERSION;
  return doc.dump(2) + "\n";
}

std::string run_constants(const RunConfig& cfg) {
  const Exponent& p = cfg.p.front();
  const double q = *cfg.q;
  const auto n = static_cast<long long>(*cfg.n);
  const auto ms = moment_set(p, q);
  const double a = threshold_constant(p, q);
  Json r;
  r["M"] = num(ms.m);
  r["V"] = num(ms.v);
  r["C_pq"] = num(ms.c_pq);
  r["A"] = num(a);
  r["t_crit_ball"] = num(1.0 / a);
  r["s2_ball"] = num(s_squared(p, q, 1.0));
  r["n"] = n;
  r["log_r_np"] = num(normalized_radius_log(n, p));
  r["r_np"] = num(std::exp(normalized_radius_log(n, p)));
  r["log_r_nq"] = num(normalized_radius_log(n, Exponent::finite(q)));
  r["r_nq"] = num(std::exp(normalized_radius_log(n, Exponent::finite(q))));
  return document(cfg, std::move(r));
}

std::string run_spectrum(const RunConfig& cfg) {
  const double q = *cfg.q;
  const auto [family, n] = resolve_source(cfg);
  const RowMoments m = row_moments(family, n, q);
  Json r;
  r["family"] = family.describe();
  r["n"] = n;
  r["q"] = q;
  r["f_n"] = num(f_n(m));
  r["g_n"] = num(g_n(m));
  r["flatness_n"] = num(flatness_n(m));
  r["noether_n"] = num(noether_n(m));

  Json per_p = Json::array();
  for (const auto& p : cfg.p) {
    const auto lim = limits_for(family, p, q);
    Json e;
    e["p"] = p.to_string();
    e["A"] = num(threshold_constant(p, q));
    e["limits"] = limits_json(lim);
    if (lim && std::isfinite(lim->F)) {
      const auto [h, z] = h_z_n(m, lim->F);
      e["h_n"] = num(h);
      e["z_n"] = num(z);
    } else {
      e["h_n"] = nullptr;
      e["z_n"] = nullptr;
    }
    e["t_crit"] = lim && lim->threshold_ok ? num(t_critical(p, q, lim->F)) : Json(nullptr);
    e["s2_finite_n"] = num(s_squared(p, q, g_n(m)));
    e["s2_limit"] = lim && lim->G ? num(s_squared(p, q, *lim->G)) : Json(nullptr);
    per_p.push_back(std::move(e));
  }
  r["per_p"] = std::move(per_p);
  return document(cfg, std::move(r));
}

McConfig mc_config(const RunConfig& cfg) { return McConfig{cfg.samples, cfg.seed, cfg.workers}; }

std::string run_volume(const RunConfig& cfg) {
  const Exponent& p = cfg.p.front();
  const double q = *cfg.q;
  const auto [family, n] = resolve_source(cfg);
  const SemiAxesRow row = materialize(family, n);
  auto est = estimate_volume(p, q, row, *cfg.t, mc_config(cfg));
  const auto lim = limits_for(family, p, q);
  Json r;
  r["hits"] = est.hits;
  r["samples"] = est.samples;
  r["estimate"] = num(est.estimate);
  r["stderr"] = num(est.std_error);
  r["ci95_lo"] = num(est.ci95_lo);
  r["ci95_hi"] = num(est.ci95_hi);
  r["seed"] = est.seed;
  r["n"] = est.n;
  r["p"] = est.p.to_string();
  r["q"] = est.q;
  r["t"] = est.t;
  r["row"] = family.describe();
  r["limits"] = limits_json(lim);
  r["t_crit"] = lim && lim->threshold_ok ? num(t_critical(p, q, lim->F)) : Json(nullptr);
  r["predicted"] = lim ? num(predict_limit(p, q, *cfg.t, *lim)) : Json(nullptr);
  return document(cfg, std::move(r));
}

std::vector<double> t_grid_for(const RunConfig& cfg) {
  std::vector<double> grid(cfg.t_steps);
  if (cfg.t_steps == 1) {
    grid[0] = *cfg.t_min;
    return grid;
  }
  const double span = *cfg.t_max - *cfg.t_min;
  for (unsigned i = 0; i < cfg.t_steps; ++i) {
    grid[i] = *cfg.t_min + span * i / static_cast<double>(cfg.t_steps - 1);
  }
  grid.back() = *cfg.t_max;
  return grid;
}

std::string run_scan(const RunConfig& cfg) {
  const Exponent& p = cfg.p.front();
  const double q = *cfg.q;
  const auto [family, n] = resolve_source(cfg);
  const auto grid = t_grid_for(cfg);
  const ScanTable table = threshold_scan(p, q, family, n, grid, mc_config(cfg));
  if (cfg.format == Format::csv) {
    std::string out = "t,estimate,stderr,predicted\n";
    for (const auto& r : table.rows) {
      out += format_number(r.t) + "," + format_number(r.estimate) + "," +
             format_number(r.std_error) + "," + (r.predicted ? format_number(*r.predicted) : "") +
             "\n";
    }
    return out;
  }
  Json r;
  r["n"] = n;
  r["row"] = family.describe();
  r["limits"] = limits_json(table.limits);
  r["t_crit"] = num(table.t_crit);
  Json rows = Json::array();
  for (const auto& row : table.rows) {
    Json e;
    e["t"] = num(row.t);
    e["estimate"] = num(row.estimate);
    e["stderr"] = num(row.std_error);
    e["predicted"] = num(row.predicted);
    rows.push_back(std::move(e));
  }
  r["rows"] = std::move(rows);
  return document(cfg, std::move(r));
}

std::string run_clt(const RunConfig& cfg) {
  const Exponent& p = cfg.p.front();
  const double q = *cfg.q;
  const auto [family, n] = resolve_source(cfg);
  const SemiAxesRow row = materialize(family, n);
  const auto lim = limits_for(family, p, q);
  const std::optional<double> limit_g = lim ? lim->G : std::nullopt;
  const CltSample sample = clt_statistic_samples(p, q, row, mc_config(cfg), limit_g);

  if (cfg.emit == Emit::samples && cfg.format == Format::csv) {
    std::string out = "value\n";
    for (double v : sample.values) out += format_number(v) + "\n";
    return out;
  }

  CompensatedSum sum;
  for (double v : sample.values) sum += v;
  const auto count = static_cast<double>(sample.values.size());
  const double mean = sum.value() / count;
  CompensatedSum sq;
  for (double v : sample.values) sq += (v - mean) * (v - mean);
  const double variance = sq.value() / (count - 1.0);

  Json r;
  r["n"] = row.size();
  r["row"] = family.describe();
  r["samples"] = sample.values.size();
  r["g_n"] = num(sample.g_n);
  r["limits"] = limits_json(lim);
  r["s2_theory"] = num(sample.s2_theory);
  r["s2_limit"] = num(sample.s2_limit);
  r["mean"] = num(mean);
  r["variance"] = num(variance);
  r["ks"] = num(sample.ks);
  r["ks_crit_1pct"] = num(ks_critical_value(0.01, sample.values.size()));
  r["ks_crit_0_1pct"] = num(ks_critical_value(0.001, sample.values.size()));
  if (cfg.emit == Emit::samples) {
    Json values = Json::array();
    for (double v : sample.values) values.push_back(num(v));
    r["values"] = std::move(values);
  }
  return document(cfg, std::move(r));
}

std::string run_asymptotics(const RunConfig& cfg) {
  std::vector<AsymptoticComparison> rows;
  std::optional<PowerLogRegime> regime;
  for (std::size_t n : cfg.n_grid) {
    switch (cfg.lemma) {
      case Lemma::factorial:
        rows.push_back(compare(n, factorial_power_exact(cfg.alpha, n),
                               factorial_power_asym(cfg.alpha, n)));
        break;
      case Lemma::sum_power_log: {
        const auto asym = sum_power_log_asym(cfg.alpha, cfg.beta, n);
        regime = asym.regime;
        rows.push_back(compare(n, sum_power_log_exact(cfg.alpha, cfg.beta, n), asym.value));
        break;
      }
      case Lemma::log_pow:
        rows.push_back(compare(n, sum_power_log_exact(0.0, cfg.beta, n),
                               sum_log_pow_expansion(cfg.beta, n, cfg.terms)));
        break;
      case Lemma::prod_log:
        rows.push_back(compare(n, prod_log_exact(n), prod_log_asym(n)));
        break;
    }
  }
  if (cfg.format == Format::csv) {
    std::string out = "n,exact,predicted,rel_error\n";
    for (const auto& r : rows) {
      out += std::to_string(r.n) + "," + format_number(r.exact) + "," +
             (std::isnan(r.predicted) ? "" : format_number(r.predicted)) + "," +
             (std::isnan(r.rel_error) ? "" : format_number(r.rel_error)) + "\n";
    }
    return out;
  }
  Json r;
  r["lemma"] = to_string(cfg.lemma);
  r["regime"] = regime ? Json(std::string(to_string(*regime))) : Json(nullptr);
  Json arr = Json::array();
  for (const auto& row : rows) {
    Json e;
    e["n"] = row.n;
    e["exact"] = num(row.exact);
    e["predicted"] = num(row.predicted);
    e["rel_error"] = num(row.rel_error);
    arr.push_back(std::move(e));
  }
  r["rows"] = std::move(arr);
  return document(cfg, std::move(r));
}

void write_atomically(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("failed writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into '" + path + "'");
  }
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    std::string doc;
    switch (cfg.command) {
      case Command::constants: doc = run_constants(cfg); break;
      case Command::spectrum: doc = run_spectrum(cfg); break;
      case Command::volume: doc = run_volume(cfg); break;
      case Command::scan: doc = run_scan(cfg); break;
      case Command::clt: doc = run_clt(cfg); break;
      case Command::asymptotics: doc = run_asymptotics(cfg); break;
    }
    if (cfg.output) {
      write_atomically(*cfg.output, doc);
    } else {
      out << doc;
      out.flush();
      if (!out) throw IoError("failed writing to standard output");
    }
    return kExitOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = parse_args(args);
  } catch (const HelpRequested& h) {
    out << h.what();
    return kExitOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
  return run(cfg, out, err);
}

}  // namespace ellvol::cli
