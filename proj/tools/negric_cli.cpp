// negric: command-line front end for the filiform negative-Ricci toolkit.
//
// Exit codes: 0 ok (including a correct "no" from decide), 2 refusal with reason,
// 3 certificate or evidence failure, 4 usage error, 5 I/O failure, 6 invalid parameters.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "negric/algebra_io.hpp"
#include "negric/criterion.hpp"
#include "negric/derivations.hpp"
#include "negric/filiform.hpp"
#include "negric/metric_constructor.hpp"
#include "negric/ricci.hpp"
#include "negric/sweep.hpp"

namespace {

using negric::Json;
using negric::Rational;

enum Exit : int { Ok = 0, Refusal = 2, CertificateFailure = 3, Usage = 4, Io = 5, InvalidParameters = 6 };

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::filesystem::path resolve_output(const std::string& out) {
  std::filesystem::path p(out);
  if (p.is_relative())
    if (const char* dir = std::getenv("NEGRIC_OUTPUT_DIR"); dir && *dir) p = std::filesystem::path(dir) / p;
  return p;
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  const auto path = resolve_output(out);
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f << text;
  if (!f) throw IoError("failed writing '" + path.string() + "'");
}

void emit(const Json& j, const std::string& out) { emit(j.dump(2) + "\n", out); }

Json load_json(const std::string& file) {
  std::ifstream f(file, std::ios::binary);
  if (!f) throw IoError("cannot read '" + file + "'");
  try {
    return Json::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    throw negric::Error(negric::ErrorCode::InvalidArgument, "'" + file + "' is not valid JSON: " + e.what());
  }
}

std::vector<double> parse_doubles(const std::string& csv) {
  std::vector<double> v;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double x = 0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size())
      throw negric::Error(negric::ErrorCode::Parse, "malformed number '" + item + "' in '" + csv + "'");
    v.push_back(x);
  }
  return v;
}

Json ints(const std::vector<std::size_t>& v) { return Json(v); }

// ---------------------------------------------------------------------------------------------

struct Common {
  std::string family = "Qn";
  std::size_t n = 6;
  std::string a, d;
  std::string out;
};

int run_catalog(const Common& c, bool alternate) {
  using namespace negric;
  const FiliformSpec spec(parse_family(c.family), c.n);
  require(!alternate || spec.family == Family::Q, ErrorCode::InvalidArgument, "--alternate applies to Qn only");
  const LieAlgebra g = alternate ? make_Qn_alternate(c.n) : make_algebra(spec);
  std::vector<std::size_t> lcs;
  for (const auto& s : lower_central_series(g)) lcs.push_back(s.dim());
  Json j{{"family", family_name(spec.family)},
         {"n", c.n},
         {"basis", alternate ? "alternate" : "standard"},
         {"algebra", algebra_to_json(g)},
         {"jacobi_defect", to_string(jacobi_defect(g))},
         {"filiform", is_filiform(g)},
         {"center_dim", center(g).dim()},
         {"lower_central_series_dims", ints(lcs)},
         {"derivation_space_dim", derivation_space(g).size()}};
  if (!alternate) {
    const auto [phi1, phi2] = torus(spec);
    j["torus"] = {{"phi1", matrix_to_json(phi1.matrix())},
                  {"phi2", matrix_to_json(phi2.matrix())},
                  {"phi1_is_derivation", is_derivation(g, phi1.matrix())},
                  {"phi2_is_derivation", is_derivation(g, phi2.matrix())},
                  {"commute", commutator(phi1.matrix(), phi2.matrix()).is_zero()}};
  }
  emit(j, c.out);
  return Ok;
}

int run_ricci(const Common& c, const std::string& x_csv, const std::string& algebra_file, const std::string& gram_file) {
  using namespace negric;
  if (!algebra_file.empty() || !gram_file.empty()) {
    require(!algebra_file.empty() && !gram_file.empty(), ErrorCode::Parse, "--algebra and --gram go together");
    const MetricLieAlgebra m(algebra_from_json(load_json(algebra_file)), matrix_from_json_double(load_json(gram_file)));
    const auto cert = certify(m);
    emit(Json{{"ricci", to_json(cert.ricci)}, {"certificate", to_json(cert)}}, c.out);
    return Ok;
  }
  const FiliformSpec spec(parse_family(c.family), c.n);
  const LieAlgebra nil = make_algebra(spec);
  const auto ni = static_cast<Eigen::Index>(c.n);
  VectorXd x = VectorXd::Zero(ni);
  if (!x_csv.empty()) {
    const auto v = parse_doubles(x_csv);
    require(v.size() == c.n, ErrorCode::InvalidArgument, "--x needs exactly n values");
    for (Eigen::Index i = 0; i < ni; ++i) x(i) = v[static_cast<std::size_t>(i)];
  }
  const MatrixXd gram = (2.0 * x).array().exp().matrix().asDiagonal();

  if (c.a.empty() && c.d.empty()) {
    const MatrixXd ric = ricci_nilpotent(nil, gram);
    emit(Json{{"family", family_name(spec.family)},
              {"n", c.n},
              {"x", to_json(x)},
              {"ricci", to_json(ric)},
              {"diagonal", to_json(VectorXd(ric.diagonal()))},
              {"trace", ric.trace()},
              {"bracket_energy", bracket_energy(nil, flag_frame(gram))}},
         c.out);
    return Ok;
  }
  require(!c.a.empty() && !c.d.empty(), ErrorCode::Parse, "--a and --d go together");
  const Rational a = parse_rational(c.a), d = parse_rational(c.d);
  const DerivationMatrix der =
      spec.family == Family::Q ? qn_diagonal_derivation(c.n, a, d) : ln_diagonal_derivation(c.n, a, d);
  const ExtensionMetric ext(nil, der, gram);
  const auto report = ricci_blocks(ext);
  const auto cert = certify(MetricLieAlgebra(ext.flattened(), ext.flattened_gram()));
  const MatrixXd general_f_last = move_first_to_last(cert.ricci);
  const double scale = std::max(1.0, inf_norm(general_f_last));
  emit(Json{{"family", family_name(spec.family)},
            {"n", c.n},
            {"a", to_string(a)},
            {"d", to_string(d)},
            {"x", to_json(x)},
            {"blocks", to_json(report)},
            {"certificate", to_json(cert)},
            {"block_vs_general", (report.full - general_f_last).cwiseAbs().maxCoeff() / scale}},
       c.out);
  return Ok;
}

int run_decide(const Common& c) {
  using namespace negric;
  const Family f = parse_family(c.family);
  const FiliformSpec spec(f, c.n);
  const Rational a = parse_rational(c.a), d = parse_rational(c.d);
  const Decision dec = f == Family::Q ? decide_Qn(c.n, a, d) : decide_Ln(c.n, a, d);
  Json j{{"family", family_name(f)}, {"n", c.n}, {"a", to_string(a)}, {"d", to_string(d)}, {"decision", to_json(dec)}};
  if (f == Family::Q && c.n >= 6) {
    const auto crit = critical_l(c.n);
    const auto profile = iota_profile(c.n, a, d);
    Json iotas = Json::object();
    for (const auto& [k, v] : profile.values) iotas["iota_" + std::to_string(k)] = to_string(v);
    j["profile"] = {{"T", to_string(profile.T)},
                    {"iota", iotas},
                    {"p", crit.p},
                    {"l", crit.l},
                    {"f_p", to_string(crit.f_p)},
                    {"f_p_plus_1", to_string(crit.f_p1)}};
  }
  emit(j, c.out);
  return Ok;
}

int run_construct(const Common& c, const std::string& lower_file) {
  using namespace negric;
  const Family f = parse_family(c.family);
  const Rational a = parse_rational(c.a), d = parse_rational(c.d);
  std::optional<RationalMatrix> lower;
  if (!lower_file.empty()) lower = matrix_from_json(load_json(lower_file));
  ConstructedMetric m;
  try {
    m = construct(f, c.n, a, d, lower);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Infeasible) throw;
    const Decision dec = f == Family::Q ? decide_Qn(c.n, a, d) : decide_Ln(c.n, a, d);
    emit(Json{{"family", family_name(f)}, {"n", c.n}, {"a", to_string(a)}, {"d", to_string(d)}, {"refused", true},
              {"decision", to_json(dec)}},
         c.out);
    std::cerr << "negric: " << e.what() << "\n";
    return Refusal;
  }
  const std::string text = to_json(m).dump(2) + "\n";
  // independent check of exactly what is written
  const auto recheck = certify(metric_from_json(Json::parse(text)));
  if (!recheck.negative_definite) {
    std::cerr << "negric: serialized metric failed re-certification (max eigenvalue "
              << recheck.eigenvalues.maxCoeff() << ")\n";
    return CertificateFailure;
  }
  emit(text, c.out);
  return Ok;
}

int run_certify(const std::string& metric_file, const std::string& out) {
  using namespace negric;
  const auto cert = certify(metric_from_json(load_json(metric_file)));
  emit(Json{{"metric", metric_file}, {"certificate", to_json(cert)}}, out);
  return cert.negative_definite ? Ok : CertificateFailure;
}

int run_sweep(const Common& c, const std::string& a_range, const std::string& d_range, unsigned threads,
              const std::string& format) {
  using namespace negric;
  const Family f = parse_family(c.family);
  const FiliformSpec spec(f, c.n);
  require(format == "csv" || format == "json", ErrorCode::Parse, "--format must be csv or json");
  const auto as = parse_range(a_range).values(), ds = parse_range(d_range).values();
  require(as.size() * ds.size() <= 4000000, ErrorCode::InvalidArgument, "sweep grid too large");

  std::vector<SweepCell> cells(as.size() * ds.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, cells.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < cells.size(); i += threads) cells[i] = sweep_cell(f, c.n, as[i / ds.size()], ds[i % ds.size()]);
    });
  for (auto& th : pool) th.join();

  const bool with_l = uses_qn_columns(f, c.n);
  if (format == "csv") {
    std::string text = sweep_csv_header(f, c.n) + "\n";
    for (const auto& cell : cells) text += sweep_csv_line(cell, with_l) + "\n";
    emit(text, c.out);
  } else {
    Json rows = Json::array();
    for (const auto& cell : cells) {
      Json forms = Json::object();
      for (const auto& [name, v] : cell.forms) forms[name] = to_string(v);
      Json row{{"a", to_string(cell.a)}, {"d", to_string(cell.d)}, {"T", to_string(cell.T)}, {"iota", forms},
               {"answer", cell.answer}, {"sign_flipped", cell.sign_flipped}};
      if (with_l) row["l"] = cell.l;
      rows.push_back(row);
    }
    emit(Json{{"family", family_name(f)}, {"n", c.n}, {"rows", rows}}, c.out);
  }
  return Ok;
}

int run_necessity(const Common& c, std::size_t samples, std::uint64_t seed, const std::string& lower_file) {
  using namespace negric;
  const Rational a = parse_rational(c.a), d = parse_rational(c.d);
  require(c.n >= 6 && c.n % 2 == 0, ErrorCode::InvalidArgument, "necessity-test runs on Q_n with even n >= 6");
  std::optional<RationalMatrix> lower;
  if (!lower_file.empty()) lower = matrix_from_json(load_json(lower_file));
  const Decision dec = decide_Qn(c.n, a, d);
  const auto report = necessity_test(c.n, a, d, samples, seed, lower);
  emit(Json{{"family", "Qn"}, {"n", c.n}, {"a", to_string(a)}, {"d", to_string(d)}, {"seed", seed},
            {"decision", to_json(dec)}, {"report", to_json(report)}},
       c.out);
  const bool evidence_broken = report.bound_failures > 0 || (!dec.answer && report.negative_definite_hits > 0);
  return evidence_broken ? CertificateFailure : Ok;
}

int exit_code(negric::ErrorCode code) {
  using negric::ErrorCode;
  switch (code) {
    case ErrorCode::Parse: return Usage;
    case ErrorCode::Infeasible: return Refusal;
    case ErrorCode::SearchExhausted: return CertificateFailure;
    default: return InvalidParameters;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"negric: negative Ricci curvature on solvable extensions of L_n and Q_n"};
  app.require_subcommand(1);
  Common c;
  auto add_family = [&](CLI::App* s, bool with_ad) {
    s->add_option("--family", c.family, "Ln or Qn")->capture_default_str();
    s->add_option("--n", c.n, "dimension of the nilradical")->capture_default_str();
    if (with_ad) {
      s->add_option("--a", c.a, "a for Qn, alpha for Ln (exact: p/q, integer or decimal)");
      s->add_option("--d", c.d, "d for Qn, beta for Ln");
    }
    s->add_option("--out", c.out, "output file (relative paths resolve against $NEGRIC_OUTPUT_DIR)");
  };

  bool alternate = false;
  auto* catalog = app.add_subcommand("catalog", "structure of L_n or Q_n and its torus of derivations");
  add_family(catalog, false);
  catalog->add_flag("--alternate", alternate, "Q_n in the basis Y_1 = X_1 - X_2");

  std::string x_csv, algebra_file, gram_file;
  auto* ricci = app.add_subcommand("ricci", "Ricci operator of a diagonal metric, or of an arbitrary metric algebra");
  add_family(ricci, true);
  ricci->add_option("--x", x_csv, "comma-separated log-scales: <X_i, X_i> = exp(2 x_i)");
  ricci->add_option("--algebra", algebra_file, "algebra JSON (with --gram)");
  ricci->add_option("--gram", gram_file, "gram matrix JSON (with --algebra)");

  auto* decide = app.add_subcommand("decide", "existence of a negative Ricci metric for a one-dimensional extension");
  add_family(decide, true);
  decide->get_option("--a")->required();
  decide->get_option("--d")->required();

  std::string lower_file;
  auto* construct = app.add_subcommand("construct", "build and certify a metric with negative Ricci curvature");
  add_family(construct, true);
  construct->get_option("--a")->required();
  construct->get_option("--d")->required();
  construct->add_option("--lower", lower_file, "strictly lower derivation part as a JSON matrix");

  std::string metric_file;
  auto* certify = app.add_subcommand("certify", "recompute Ric of a metric document; exit 3 unless negative definite");
  certify->add_option("--metric", metric_file, "metric JSON written by construct")->required();
  certify->add_option("--out", c.out, "output file");

  std::string a_range, d_range, format = "csv";
  unsigned threads = 0;
  auto* sweep = app.add_subcommand("sweep", "decision over an exact (a, d) grid");
  add_family(sweep, false);
  sweep->add_option("--a", a_range, "lo..hi/step or lo..hi:step")->required();
  sweep->add_option("--d", d_range, "lo..hi/step or lo..hi:step")->required();
  sweep->add_option("--threads", threads, "worker threads (0 = hardware)")->capture_default_str();
  sweep->add_option("--format", format, "csv or json")->capture_default_str();

  std::size_t samples = 200;
  std::uint64_t seed = 0;
  auto* necessity = app.add_subcommand("necessity-test", "random metrics on an extension of Q_n; trace-bound check");
  add_family(necessity, true);
  necessity->get_option("--a")->required();
  necessity->get_option("--d")->required();
  necessity->add_option("--samples", samples)->capture_default_str();
  necessity->add_option("--seed", seed)->required();
  necessity->add_option("--lower", lower_file, "strictly lower derivation part as a JSON matrix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? Ok : Usage;
  }

  try {
    if (*catalog) return run_catalog(c, alternate);
    if (*ricci) return run_ricci(c, x_csv, algebra_file, gram_file);
    if (*decide) return run_decide(c);
    if (*construct) return run_construct(c, lower_file);
    if (*certify) return run_certify(metric_file, c.out);
    if (*sweep) return run_sweep(c, a_range, d_range, threads, format);
    if (*necessity) return run_necessity(c, samples, seed, lower_file);
  } catch (const IoError& e) {
    std::cerr << "negric: " << e.what() << "\n";
    return Io;
  } catch (const negric::Error& e) {
    std::cerr << "negric: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "negric: malformed document: " << e.what() << "\n";
    return InvalidParameters;
  }
  return Usage;
}
