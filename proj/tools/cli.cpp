#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "jetlab/jetlab.hpp"

namespace jetlab::cli {

namespace {

using nlohmann::json;

double parse_double(std::string_view text, std::string_view what) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) {
    throw UsageError("malformed " + std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

enum class Format { Json, Csv };

struct RunConfig {
  std::string command;
  int m = 1;
  std::string points;
  std::string model = "bf";
  int n_power = 0;
  bool raw_points = false;
  double limit_factor = 0.0;  // 0 -> m!
  std::string law = "normalized-gaussian";
  std::string comparison = "exact";
  std::string ns;
  std::size_t samples = 100000;
  std::size_t chunk_size = 4096;
  std::uint64_t seed = 0;
  std::string format;
  std::string out;
  bool timing = false;
  std::size_t d = 0;
  std::size_t k = 1;
  std::string grid;
  bool limit = false;
  std::size_t count = 1;
};

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

json matrix_json(const ComplexMatrix& mtx) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < mtx.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < mtx.cols(); ++j) row.push_back(complex_json(mtx(i, j)));
    rows.push_back(std::move(row));
  }
  return {{"rows", mtx.rows()}, {"cols", mtx.cols()}, {"entries", std::move(rows)}};
}

json layout_json(const JetLayout& layout) {
  json slots = json::array();
  for (int i = 0; i < layout.size(); ++i) {
    const auto s = layout.slot(i);
    json slot = {{"index", i}, {"name", layout.slot_name(i)}, {"point", s.point + 1}};
    if (s.is_value) {
      slot["kind"] = "value";
    } else {
      slot["kind"] = layout.is_antiholomorphic_slot(i) ? "antiholomorphic" : "holomorphic";
      slot["q"] = s.derivative + 1;
    }
    slots.push_back(std::move(slot));
  }
  return {{"m", layout.m()}, {"n", layout.n()}, {"size", layout.size()}, {"slots", std::move(slots)}};
}

std::string matrix_csv(const ComplexMatrix& mtx) {
  std::string s = "row,col,re,im\n";
  for (Eigen::Index i = 0; i < mtx.rows(); ++i) {
    for (Eigen::Index j = 0; j < mtx.cols(); ++j) {
      s += std::to_string(i) + "," + std::to_string(j) + "," + fmt17(mtx(i, j).real()) + "," +
           fmt17(mtx(i, j).imag()) + "\n";
    }
  }
  return s;
}

double factorial(int m) {
  double f = 1.0;
  for (int i = 2; i <= m; ++i) f *= i;
  return f;
}

EnsembleFamily family_for(const RunConfig& cfg) {
  if (cfg.model == "bf" || cfg.model == "bargmann-fock") return bargmann_fock_family(cfg.m);
  if (cfg.model == "fs" || cfg.model == "fubini-study" || cfg.model == "gram") {
    if (cfg.m != 1) throw UsageError("the fubini-study model is only defined for m = 1");
    return fubini_study_family();
  }
  throw UsageError("unknown model '" + cfg.model + "' (expected bf or fs)");
}

Format format_for(const RunConfig& cfg, Format fallback) {
  if (cfg.format.empty()) return fallback;
  if (cfg.format == "json") return Format::Json;
  if (cfg.format == "csv") return Format::Csv;
  throw UsageError("unknown format '" + cfg.format + "' (expected json or csv)");
}

json config_json(const RunConfig& cfg) {
  json c = {{"seed", cfg.seed}, {"chunk_size", cfg.chunk_size}};
  if (!cfg.points.empty()) {
    c["m"] = cfg.m;
    c["points"] = cfg.points;
  }
  return c;
}

void require_samples(const RunConfig& cfg) {
  if (cfg.samples < 10) throw UsageError("--samples must be at least 10");
  if (cfg.chunk_size < 1) throw UsageError("--chunk-size must be positive");
}

// Model covariance at the configured points (scaled by 1/sqrt(N) unless --raw-points).
PointConfiguration model_points(const RunConfig& cfg, const PointConfiguration& z) {
  return cfg.raw_points ? z : z.scaled(cfg.n_power);
}

void require_n(const RunConfig& cfg) {
  if (cfg.n_power < 1) throw UsageError("--N must be a positive integer");
}

std::string cmd_limit_cov(const RunConfig& cfg) {
  const auto z = parse_points(cfg.points, cfg.m);
  const double factor = cfg.limit_factor > 0.0 ? cfg.limit_factor : factorial(cfg.m);
  const HermitianMatrix delta = limit_covariance(z, factor);
  if (format_for(cfg, Format::Json) == Format::Csv) return matrix_csv(delta.matrix());
  json cfg_json = config_json(cfg);
  cfg_json["limit_factor"] = factor;
  json doc = {{"command", "limit-cov"}, {"config", cfg_json}, {"layout", layout_json(JetLayout(z))},
              {"data", matrix_json(delta.matrix())}};
  return doc.dump(2) + "\n";
}

std::string cmd_exact_cov(const RunConfig& cfg) {
  require_n(cfg);
  const auto z = parse_points(cfg.points, cfg.m);
  const auto family = family_for(cfg);
  const HermitianMatrix delta = exact_covariance(family.make(cfg.n_power), model_points(cfg, z)).assemble();
  if (format_for(cfg, Format::Json) == Format::Csv) return matrix_csv(delta.matrix());
  json cfg_json = config_json(cfg);
  cfg_json["model"] = family.name;
  cfg_json["N"] = cfg.n_power;
  cfg_json["scaled"] = !cfg.raw_points;
  json doc = {{"command", "exact-cov"}, {"config", cfg_json}, {"layout", layout_json(JetLayout(z))},
              {"data", matrix_json(delta.matrix())}};
  return doc.dump(2) + "\n";
}

std::string cmd_mc_cov(const RunConfig& cfg) {
  require_n(cfg);
  require_samples(cfg);
  const auto z = parse_points(cfg.points, cfg.m);
  const auto family = family_for(cfg);
  EnsembleLaw law;
  try {
    law = parse_ensemble_law(cfg.law);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const HermitianMatrix delta = empirical_covariance(family.make(cfg.n_power), model_points(cfg, z), law,
                                                     StreamSpec{cfg.seed, cfg.chunk_size}, cfg.samples);
  if (format_for(cfg, Format::Json) == Format::Csv) return matrix_csv(delta.matrix());
  json cfg_json = config_json(cfg);
  cfg_json["model"] = family.name;
  cfg_json["N"] = cfg.n_power;
  cfg_json["scaled"] = !cfg.raw_points;
  cfg_json["law"] = std::string(to_string(law));
  cfg_json["samples"] = cfg.samples;
  json doc = {{"command", "mc-cov"}, {"config", cfg_json}, {"layout", layout_json(JetLayout(z))},
              {"data", matrix_json(delta.matrix())}};
  return doc.dump(2) + "\n";
}

std::string cmd_converge(const RunConfig& cfg) {
  const auto ns = parse_int_list(cfg.ns);
  if (ns.empty()) throw UsageError("--Ns must list at least one N");
  const auto z = parse_points(cfg.points, cfg.m);
  const auto family = family_for(cfg);
  Comparison comparison;
  try {
    comparison = parse_comparison(cfg.comparison);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (comparison != Comparison::Exact) require_samples(cfg);
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (ns[i] < 4) throw UsageError("every N in --Ns must be at least 4");
    if (i > 0 && ns[i] <= ns[i - 1]) throw UsageError("--Ns must be strictly increasing");
  }
  const auto report = converge_sweep(family, z, ns, comparison, StreamSpec{cfg.seed, cfg.chunk_size}, cfg.samples);

  if (format_for(cfg, Format::Csv) == Format::Json) {
    json rows = json::array();
    for (const auto& r : report.rows) {
      json row = {{"N", r.n_power}, {"frobenius", r.frobenius}, {"spectral", r.spectral}};
      row["seconds"] = cfg.timing ? json(r.seconds) : json(nullptr);
      rows.push_back(std::move(row));
    }
    json cfg_json = config_json(cfg);
    cfg_json["model"] = family.name;
    cfg_json["comparison"] = cfg.comparison;
    cfg_json["samples"] = cfg.samples;
    json doc = {{"command", "converge"}, {"config", cfg_json}, {"layout", layout_json(JetLayout(z))},
                {"data", {{"rows", std::move(rows)}, {"slope", report.slope}}}};
    return doc.dump(2) + "\n";
  }
  std::string s = "N,frobenius,spectral,seconds\n";
  for (const auto& r : report.rows) {
    s += std::to_string(r.n_power) + "," + fmt17(r.frobenius) + "," + fmt17(r.spectral) + "," +
         (cfg.timing ? fmt17(r.seconds) : std::string("nan")) + "\n";
  }
  s += "# slope=" + fmt17(report.slope) + "\n";
  return s;
}

std::string cmd_pb(const RunConfig& cfg) {
  require_samples(cfg);
  if (cfg.d < cfg.k + 2) throw UsageError("--d must be at least k + 2");
  if (cfg.k < 1) throw UsageError("--k must be positive");
  const auto report = poincare_borel_check(cfg.d, cfg.k, StreamSpec{cfg.seed, cfg.chunk_size}, cfg.samples);
  if (format_for(cfg, Format::Csv) == Format::Json) {
    json cov = json::array();
    for (Eigen::Index i = 0; i < report.covariance.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < report.covariance.cols(); ++j) row.push_back(report.covariance(i, j));
      cov.push_back(std::move(row));
    }
    json cfg_json = config_json(cfg);
    cfg_json["d"] = cfg.d;
    cfg_json["k"] = cfg.k;
    cfg_json["samples"] = cfg.samples;
    json doc = {{"command", "pb"}, {"config", cfg_json}, {"data", {{"ks", report.ks}, {"covariance", cov}}}};
    return doc.dump(2) + "\n";
  }
  std::string s = "d,k,coordinate,ks\n";
  for (std::size_t i = 0; i < report.ks.size(); ++i) {
    s += std::to_string(cfg.d) + "," + std::to_string(cfg.k) + "," + std::to_string(i + 1) + "," +
         fmt17(report.ks[i]) + "\n";
  }
  return s;
}

std::string cmd_density(const RunConfig& cfg) {
  if (cfg.k < 1) throw UsageError("--k must be positive");
  if (cfg.d < cfg.k + 2) throw UsageError("--d must be at least k + 2");
  const Grid grid = parse_grid(cfg.grid);
  std::vector<double> axis(grid.count);
  for (int i = 0; i < grid.count; ++i) {
    axis[i] = grid.count == 1 ? grid.lo : grid.lo + (grid.hi - grid.lo) * i / (grid.count - 1);
  }
  // Tensor grid over R^k, first coordinate fastest.
  std::size_t total = 1;
  for (std::size_t j = 0; j < cfg.k; ++j) total *= axis.size();
  std::vector<RealVector> points;
  std::vector<double> values;
  std::vector<std::size_t> idx(cfg.k, 0);
  for (std::size_t c = 0; c < total; ++c) {
    RealVector x(static_cast<Eigen::Index>(cfg.k));
    for (std::size_t j = 0; j < cfg.k; ++j) x(static_cast<Eigen::Index>(j)) = axis[idx[j]];
    points.push_back(x);
    values.push_back(projection_density(cfg.d, cfg.k, x));
    for (std::size_t j = 0; j < cfg.k; ++j) {
      if (++idx[j] < axis.size()) break;
      idx[j] = 0;
    }
  }
  if (format_for(cfg, Format::Csv) == Format::Json) {
    json pts = json::array();
    for (const auto& p : points) pts.push_back(std::vector<double>(p.data(), p.data() + p.size()));
    json cfg_json = config_json(cfg);
    cfg_json["d"] = cfg.d;
    cfg_json["k"] = cfg.k;
    cfg_json["grid"] = cfg.grid;
    json doc = {{"command", "density"}, {"config", cfg_json}, {"data", {{"points", pts}, {"values", values}}}};
    return doc.dump(2) + "\n";
  }
  std::string s;
  for (std::size_t j = 0; j < cfg.k; ++j) s += "x" + std::to_string(j + 1) + ",";
  s += "density\n";
  for (std::size_t c = 0; c < points.size(); ++c) {
    for (Eigen::Index j = 0; j < points[c].size(); ++j) s += fmt17(points[c](j)) + ",";
    s += fmt17(values[c]) + "\n";
  }
  return s;
}

std::string cmd_sample(const RunConfig& cfg) {
  if (cfg.count < 1) throw UsageError("--count must be at least 1");
  const auto z = parse_points(cfg.points, cfg.m);
  HermitianMatrix delta;
  json cfg_json = config_json(cfg);
  if (cfg.limit) {
    const double factor = cfg.limit_factor > 0.0 ? cfg.limit_factor : factorial(cfg.m);
    delta = limit_covariance(z, factor);
    cfg_json["limit"] = true;
    cfg_json["limit_factor"] = factor;
  } else {
    require_n(cfg);
    const auto family = family_for(cfg);
    delta = exact_covariance(family.make(cfg.n_power), model_points(cfg, z)).assemble();
    cfg_json["limit"] = false;
    cfg_json["model"] = family.name;
    cfg_json["N"] = cfg.n_power;
    cfg_json["scaled"] = !cfg.raw_points;
  }
  cfg_json["count"] = cfg.count;
  const GeneralizedGaussian law = jpd_measure(delta);
  const ComplexMatrix samples = gaussian_sample(law, StreamSpec{cfg.seed, cfg.chunk_size}, cfg.count);
  if (format_for(cfg, Format::Json) == Format::Csv) {
    std::string s = "sample,slot,re,im\n";
    for (Eigen::Index c = 0; c < samples.cols(); ++c) {
      for (Eigen::Index i = 0; i < samples.rows(); ++i) {
        s += std::to_string(c) + "," + std::to_string(i) + "," + fmt17(samples(i, c).real()) + "," +
             fmt17(samples(i, c).imag()) + "\n";
      }
    }
    return s;
  }
  json data = json::array();
  for (Eigen::Index c = 0; c < samples.cols(); ++c) {
    json jet = json::array();
    for (Eigen::Index i = 0; i < samples.rows(); ++i) jet.push_back(complex_json(samples(i, c)));
    data.push_back(std::move(jet));
  }
  json doc = {{"command", "sample"}, {"config", cfg_json}, {"layout", layout_json(JetLayout(z))},
              {"data", std::move(data)}};
  return doc.dump(2) + "\n";
}

}  // namespace

std::complex<double> parse_complex(std::string_view raw) {
  const std::string text = trim(raw);
  if (text.empty()) throw UsageError("empty complex number");
  if (text.back() != 'i') return {parse_double(text, "complex number"), 0.0};
  const std::string body = text.substr(0, text.size() - 1);
  // Split at the last sign that is not a leading sign or an exponent sign.
  std::size_t split_at = std::string::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split_at = i;
      break;
    }
  }
  auto imag_part = [](const std::string& s) {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    return parse_double(s, "imaginary part");
  };
  if (split_at == std::string::npos) return {0.0, imag_part(body)};
  return {parse_double(body.substr(0, split_at), "real part"), imag_part(body.substr(split_at))};
}

PointConfiguration parse_points(std::string_view text, int m) {
  if (m < 1) throw UsageError("--m must be positive");
  if (trim(text).empty()) throw UsageError("--points is empty");
  const auto pts = split(text, ',');
  ComplexMatrix mtx(m, static_cast<Eigen::Index>(pts.size()));
  for (std::size_t p = 0; p < pts.size(); ++p) {
    const auto coords = split(pts[p], '/');
    if (static_cast<int>(coords.size()) != m) {
      throw UsageError("point " + std::to_string(p + 1) + " has " + std::to_string(coords.size()) +
                       " coordinates, expected m = " + std::to_string(m));
    }
    for (int q = 0; q < m; ++q) mtx(q, static_cast<Eigen::Index>(p)) = parse_complex(coords[q]);
  }
  if (!mtx.allFinite()) throw UsageError("--points contains a non-finite coordinate");
  return PointConfiguration(std::move(mtx));
}

std::vector<int> parse_int_list(std::string_view text) {
  std::vector<int> out;
  if (trim(text).empty()) return out;
  for (auto part : split(text, ',')) {
    const std::string s = trim(part);
    int value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() || value < 1) {
      throw UsageError("malformed positive integer '" + s + "'");
    }
    out.push_back(value);
  }
  return out;
}

Grid parse_grid(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw UsageError("--grid must look like lo:hi:count");
  Grid g;
  g.lo = parse_double(trim(parts[0]), "grid bound");
  g.hi = parse_double(trim(parts[1]), "grid bound");
  const std::string c = trim(parts[2]);
  const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), g.count);
  if (ec != std::errc() || ptr != c.data() + c.size() || g.count < 1) {
    throw UsageError("--grid count must be a positive integer");
  }
  return g;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Jet covariance laboratory: Gaussian and spherical section ensembles and their scaling limits",
               "jetlab"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "master seed (u64)")->capture_default_str();
    sub->add_option("--samples", cfg.samples, "Monte Carlo sample count")->capture_default_str();
    sub->add_option("--chunk-size", cfg.chunk_size, "samples per independently seeded chunk")
        ->capture_default_str();
    sub->add_option("--format", cfg.format, "json or csv");
    sub->add_option("--out", cfg.out, "output file (default stdout)");
  };
  auto add_points = [&](CLI::App* sub) {
    sub->add_option("--m", cfg.m, "complex dimension")->capture_default_str();
    sub->add_option("--points", cfg.points, "points: ',' between points, '/' between coordinates")
        ->required();
  };
  auto add_model = [&](CLI::App* sub, bool n_required) {
    sub->add_option("--model", cfg.model, "bf (Bargmann-Fock) or fs (Fubini-Study, m = 1)")
        ->capture_default_str();
    auto* n = sub->add_option("--N", cfg.n_power, "tensor power");
    if (n_required) n->required();
    sub->add_flag("--raw-points", cfg.raw_points, "use the points as given instead of z/sqrt(N)");
  };

  auto* limit_cov = app.add_subcommand("limit-cov", "universal limit covariance");
  add_common(limit_cov);
  add_points(limit_cov);
  limit_cov->add_option("--limit-factor", cfg.limit_factor, "overall factor (default m!)");

  auto* exact_cov = app.add_subcommand("exact-cov", "exact jet covariance of a model ensemble");
  add_common(exact_cov);
  add_points(exact_cov);
  add_model(exact_cov, true);

  auto* mc_cov = app.add_subcommand("mc-cov", "Monte Carlo jet covariance");
  add_common(mc_cov);
  add_points(mc_cov);
  add_model(mc_cov, true);
  mc_cov->add_option("--law", cfg.law, "normalized-gaussian | spherical | unnormalized-gaussian | ball")
      ->capture_default_str();

  auto* converge = app.add_subcommand("converge", "distance to the scaling limit over N");
  add_common(converge);
  add_points(converge);
  converge->add_option("--model", cfg.model, "bf or fs")->capture_default_str();
  converge->add_option("--Ns", cfg.ns, "comma-separated increasing tensor powers")->required();
  converge->add_option("--comparison", cfg.comparison, "exact | spherical-mc | gaussian-mc")
      ->capture_default_str();
  converge->add_flag("--timing", cfg.timing, "fill the seconds column with wall times");

  auto* pb = app.add_subcommand("pb", "Poincare-Borel check on the sphere");
  add_common(pb);
  pb->add_option("--d", cfg.d, "ambient real dimension")->required();
  pb->add_option("--k", cfg.k, "number of projected coordinates")->capture_default_str();

  auto* density = app.add_subcommand("density", "projection density of the sphere on a grid");
  add_common(density);
  density->add_option("--d", cfg.d, "ambient real dimension")->required();
  density->add_option("--k", cfg.k, "projection rank")->capture_default_str();
  density->add_option("--grid", cfg.grid, "lo:hi:count per axis")->required();

  auto* sample = app.add_subcommand("sample", "jet samples from the joint distribution");
  add_common(sample);
  add_points(sample);
  add_model(sample, false);
  sample->add_flag("--limit", cfg.limit, "sample the universal limit law");
  sample->add_option("--limit-factor", cfg.limit_factor, "overall factor for --limit (default m!)");
  sample->add_option("--count", cfg.count, "number of samples")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kExitUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  cfg.command = chosen->get_name();
  std::string text;
  try {
    if (cfg.command == "limit-cov") text = cmd_limit_cov(cfg);
    else if (cfg.command == "exact-cov") text = cmd_exact_cov(cfg);
    else if (cfg.command == "mc-cov") text = cmd_mc_cov(cfg);
    else if (cfg.command == "converge") text = cmd_converge(cfg);
    else if (cfg.command == "pb") text = cmd_pb(cfg);
    else if (cfg.command == "density") text = cmd_density(cfg);
    else if (cfg.command == "sample") text = cmd_sample(cfg);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n" << chosen->help();
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }

  if (cfg.out.empty() || cfg.out == "-") {
    out << text;
  } else {
    std::ofstream file(cfg.out, std::ios::binary);
    if (!file) {
      err << "error: cannot open " << cfg.out << " for writing\n";
      return kExitRuntime;
    }
    file << text;
    if (!file) {
      err << "error: failed writing " << cfg.out << "\n";
      return kExitRuntime;
    }
  }
  return kExitOk;
}

}  // namespace jetlab::cli
