#include "primeorbits/cli.hpp"

#include <openssl/sha.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <thread>

#include "primeorbits/counting.hpp"
#include "primeorbits/errors.hpp"
#include "primeorbits/parallel.hpp"
#include "primeorbits/probes.hpp"
#include "primeorbits/thermo.hpp"
#include "primeorbits/transfer.hpp"
#include "primeorbits/zeta.hpp"

namespace primeorbits {

namespace fs = std::filesystem;
using nlohmann::json;

std::string sha256_hex(const std::string& data) {
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(data.data()), data.size(), digest);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned char c : digest) {
    out += hex[c >> 4];
    out += hex[c & 15];
  }
  return out;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoError, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

// json has no NaN or infinity; write null instead
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::vector<int> parse_word(const std::string& s) {
  std::vector<int> w;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      w.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      fail(ErrorKind::ParseError, "bad symbol word '" + s + "'");
    }
  }
  return w;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  if (s.empty()) return v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      fail(ErrorKind::ParseError, "bad number list '" + s + "'");
    }
  }
  return v;
}

RationalMap load_map(const std::string& arg) {
  if (fs::is_regular_file(arg)) return RationalMap::from_json(read_file(arg));
  std::string name = fs::path(arg).filename().string();
  if (name.size() > 5 && name.ends_with(".json")) name.resize(name.size() - 5);
  if (auto m = builtin_map(name)) return *m;
  fail(ErrorKind::IoError, "map '" + arg + "' is neither a readable file nor a built-in map name");
}

struct Options {
  std::string map;
  std::string coding;
  std::string out_dir = ".";
  unsigned threads = 0;
  std::uint64_t seed = 1;
  double tol = 1e-9;
  std::string db;
  int nmax = 12;
  std::string backend = "auto";

  // dimension
  int nmin = 0;
  std::string method = "both";
  int depth = 10;
  // zeta
  std::vector<int> ells{0};
  std::string rect;
  double step = 0.01;
  double trust_tol = 0.05;
  // count / equidist
  std::string tgrid;
  double delta = 0.0;
  int lmax = 8;
  // probes
  std::vector<double> b{5.0};
  int ell = 0;
  int steps = 40;
  int level = 0;
  std::string word1 = "0,0,0";
  std::string word2 = "0,1,1";
  std::string center;
  double half_width = 0.02;
  int count = 5;
  std::string prefix = "0";
  int directions = 8;
  std::string radii;
  std::size_t centers = 256;
  int piece = -1;
};

RationalMap initial_map(const Options& o) {
  if (!o.map.empty()) return load_map(o.map);
  if (!o.db.empty()) return OrbitDatabase::load(o.db).map();
  fail(ErrorKind::InvalidArgument, "--map is required unless --db is given");
}

class Runner {
 public:
  explicit Runner(const Options& o) : o_(o), map_(initial_map(o)) {
    tol_.point = o.tol;
    tol_.merge = o.tol;
  }

  std::map<std::string, std::string> files;
  json summary = json::object();

  const RationalMap& map() const { return map_; }
  const Tolerances& tol() const { return tol_; }

  const CodingScheme& scheme() {
    if (scheme_) return *scheme_;
    if (!o_.coding.empty()) {
      if (fs::is_regular_file(o_.coding))
        scheme_ = CodingScheme::user_markov_from_json(map_, read_file(o_.coding));
      else if (o_.coding == "full")
        scheme_ = detect_full_shift(map_);
      else if (auto c = builtin_coding(o_.coding, map_))
        scheme_ = *c;
      else
        fail(ErrorKind::IoError, "coding '" + o_.coding + "' is neither a readable file nor a built-in coding");
      return *scheme_;
    }
    for (const auto& name : builtin_map_names())
      if (builtin_map(name) == map_)
        if (auto c = builtin_coding(name, map_)) return *(scheme_ = *c);
    scheme_ = detect_full_shift(map_);
    return *scheme_;
  }

  const OrbitDatabase& db(int n_max) {
    if (db_) return *db_;
    if (!o_.db.empty()) {
      db_ = OrbitDatabase::load(o_.db);
      if (!(db_->map() == map_))
        fail(ErrorKind::InvalidArgument, "--db was built for a different map than --map");
      return *db_;
    }
    std::string backend = o_.backend;
    if (backend == "auto") {
      try {
        backend = scheme().kind() == CodingKind::FullShift ? "symbolic" : "roots";
      } catch (const Error&) {
        backend = "roots";
      }
    }
    if (backend == "both")
      db_ = OrbitDatabase::build_both(map_, n_max, scheme(), tol_);
    else if (backend == "symbolic")
      db_ = OrbitDatabase::build(map_, n_max, Backend::Symbolic, &scheme(), tol_);
    else if (backend == "roots")
      db_ = OrbitDatabase::build(map_, n_max, Backend::Roots, nullptr, tol_);
    else
      fail(ErrorKind::InvalidArgument, "unknown backend '" + o_.backend + "'");
    return *db_;
  }
  const OrbitDatabase& db() { return db(o_.nmax); }

  double delta() {
    if (o_.delta > 0.0) return o_.delta;
    if (!delta_) {
      const auto& d = db();
      delta_ = estimate_delta(d, std::max(2, d.n_max() - 6), d.n_max()).delta;
    }
    return *delta_;
  }

  void orbits() {
    const auto& d = db();
    files["orbits.csv"] = d.csv();
    files["orbits.json"] = d.sidecar_json();
    if (!d.agreement().empty()) {
      std::string csv = "period,roots_count,symbolic_count,hausdorff\n";
      json rows = json::array();
      for (const auto& a : d.agreement()) {
        csv += std::to_string(a.period) + "," + std::to_string(a.roots_count) + "," +
               std::to_string(a.symbolic_count) + "," + fmt(a.hausdorff) + "\n";
        rows.push_back({{"period", a.period}, {"roots", a.roots_count}, {"symbolic", a.symbolic_count},
                        {"hausdorff", a.hausdorff}});
      }
      files["agreement.csv"] = csv;
      summary["agreement"] = rows;
    }
    summary["orbits"] = d.orbits().size();
    summary["horizon"] = d.horizon();
  }

  void dimension() {
    json j;
    std::string csv = "method,n,delta_n\n";
    if (o_.method == "orbits" || o_.method == "both") {
      const auto& d = db();
      const int n_min = o_.nmin > 0 ? o_.nmin : std::max(2, d.n_max() - 6);
      const auto est = estimate_delta(d, n_min, d.n_max());
      for (std::size_t k = 0; k < est.per_level.size(); ++k)
        csv += "PeriodicOrbit," + std::to_string(est.n_min + static_cast<int>(k)) + "," + fmt(est.per_level[k]) + "\n";
      j["periodic_orbit"] = {{"delta", est.delta}, {"uncertainty", est.uncertainty}, {"n_min", est.n_min},
                             {"n_max", est.n_max}, {"per_level", est.per_level}};
      j["delta"] = est.delta;
    }
    if (o_.method == "eigen" || o_.method == "both") {
      const TransferOperator op(map_, scheme(), o_.depth);
      const auto est = estimate_delta_eigen(op);
      csv += "LeadingEigenvalue," + std::to_string(o_.depth) + "," + fmt(est.delta) + "\n";
      j["leading_eigenvalue"] = {
          {"delta", est.delta}, {"uncertainty", est.uncertainty}, {"depth", o_.depth}, {"states", op.size()}};
      if (!j.contains("delta")) j["delta"] = est.delta;
    }
    if (j.is_null()) fail(ErrorKind::InvalidArgument, "--method must be orbits, eigen or both");
    if (j.contains("periodic_orbit") && j.contains("leading_eigenvalue"))
      j["method_gap"] = std::abs(j["periodic_orbit"]["delta"].get<double>() -
                                 j["leading_eigenvalue"]["delta"].get<double>());
    files["dimension.csv"] = csv;
    files["dimension.json"] = j.dump(2) + "\n";
    summary = j;
  }

  void zeta() {
    const auto& d = db();
    const double dl = delta();
    ScanRect rect{dl - 0.02, dl + 0.05, -10.0, 10.0};
    if (!o_.rect.empty()) {
      std::string s = o_.rect;
      for (char& c : s)
        if (c == ':') c = ',';
      const auto v = parse_list(s);
      if (v.size() != 4) fail(ErrorKind::ParseError, "--rect needs a0:a1:b0:b1");
      rect = {v[0], v[1], v[2], v[3]};
    }
    json reports = json::array();
    for (int ell : o_.ells) {
      const auto r = scan_for_zeros_poles(d, ell, rect, o_.step, o_.trust_tol);
      files["zeta_l" + std::to_string(ell) + ".csv"] = scan_csv(r);
      json rj = {{"ell", ell},
                 {"trusted", r.trusted_count},
                 {"grid", r.grid.size()},
                 {"min_abs_zeta", num(r.min_abs_zeta)},
                 {"min_at", {r.min_a, r.min_b}}};
      if (r.real_pole) {
        rj["real_pole"] = *r.real_pole;
        rj["real_min_abs_inverse"] = r.real_min_abs_inverse;
      }
      reports.push_back(rj);
    }
    summary = {{"delta", dl}, {"rect", {rect.a0, rect.a1, rect.b0, rect.b1}}, {"step", o_.step}, {"scans", reports}};
    files["zeta.json"] = summary.dump(2) + "\n";
  }

  void count() {
    const auto& d = db();
    const auto grid = parse_t_grid(o_.tgrid.empty() ? "log:10:h:50" : o_.tgrid, d.horizon());
    const auto r = count_report(d, delta(), grid);
    files["count.csv"] = r.csv();
    summary = {{"delta", r.delta},
               {"horizon", d.horizon()},
               {"beta_hat", num(r.beta_hat)},
               {"beta_points", r.beta_points},
               {"max_rel_error_top_decade", num(r.max_rel_error_top)},
               {"N_t_max", r.N_t.back()}};
    files["count.json"] = summary.dump(2) + "\n";
  }

  void equidist() {
    const auto& d = db();
    const auto grid = parse_t_grid(o_.tgrid.empty() ? "log:10:h:20" : o_.tgrid, d.horizon());
    const auto w = weyl_report(d, o_.lmax, grid);
    files["weyl.csv"] = w.csv();
    const std::size_t last = grid.size() - 1;
    json norm = json::object();
    for (int ell = 1; ell <= o_.lmax; ++ell) norm[std::to_string(ell)] = w.normalized(ell, last);
    summary = {{"t", grid.back()}, {"N_t", w.N_t[last]}, {"normalized", norm}};
    try {
      const auto cos_psi = [](double th) { return cplx(std::cos(th), 0.0); };
      const auto p = psi_sum(d, cos_psi, {0.5, 0.0, 0.5}, grid.back(), delta());
      summary["psi_cos"] = {{"direct", cjson(p.direct)}, {"fourier", cjson(p.fourier)}, {"route_gap", p.route_gap}};
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::CircleCase) throw;
      summary["psi_cos"] = {{"refused", e.what()}};
    }
    files["equidist.json"] = summary.dump(2) + "\n";
  }

  EmpiricalMeasure measure(double dl) {
    const int level = o_.level > 0 ? o_.level : std::min(o_.nmax, 12);
    return equilibrium_weights(db(level), std::min(level, db(level).n_max()), dl);
  }

  void decay() {
    const TransferOperator op(map_, scheme(), o_.depth);
    const double dl = o_.delta > 0.0 ? o_.delta : estimate_delta_eigen(op).delta;
    const auto mu = measure(dl);
    const NormalizedOperator L(op, dl);
    const auto one = L.apply(dl, 0, std::vector<cplx>(op.size(), 1.0));
    double err1 = 0.0;
    for (cplx v : one) err1 = std::max(err1, std::abs(v - 1.0));
    std::string csv = "b,ell,k,log_norm\n";
    json runs = json::array();
    for (double b : o_.b) {
      const auto r = decay_probe(op, {dl, b}, o_.ell, o_.steps, mu);
      for (std::size_t k = 0; k < r.log_norms.size(); ++k)
        csv += fmt(b) + "," + std::to_string(o_.ell) + "," + std::to_string(k) + "," + fmt(r.log_norms[k]) + "\n";
      runs.push_back({{"b", b}, {"ell", o_.ell}, {"rho", r.rho}, {"fit_from", r.fit_from}});
    }
    files["decay.csv"] = csv;
    summary = {{"delta", dl},           {"states", op.size()},         {"normalization_error", err1},
               {"measure_points", mu.points.size()}, {"runs", runs}};
    files["decay.json"] = summary.dump(2) + "\n";
  }

  void nli() {
    NliGrid g = default_nli_grid(map_, scheme());
    if (!o_.center.empty()) {
      const auto c = parse_list(o_.center);
      if (c.size() != 2) fail(ErrorKind::ParseError, "--center needs re,im");
      g.center = {c[0], c[1]};
    }
    g.half_width = o_.half_width;
    g.count = o_.count;
    const auto r = nli_probe(map_, scheme(), {parse_word(o_.word1)}, {parse_word(o_.word2)}, g);
    summary = {{"center", cjson(g.center)},
               {"half_width", g.half_width},
               {"grid_points", r.grid_points},
               {"step", r.step},
               {"min_singular_value", r.min_singular_value},
               {"max_singular_value", r.max_singular_value},
               {"richardson_gap", r.richardson_gap}};
    if (r.real_variant) summary["max_real_derivative"] = r.max_real_derivative;
    files["nli.json"] = summary.dump(2) + "\n";
  }

  void ncp() {
    const auto pts = cylinder_points(map_, scheme(), {parse_word(o_.prefix)}, o_.depth);
    const auto r = ncp_probe(pts, o_.directions, parse_list(o_.radii), o_.centers, o_.seed);
    std::string csv = "direction,delta1\n";
    for (std::size_t k = 0; k < r.directions.size(); ++k)
      csv += fmt(r.directions[k]) + "," + fmt(r.per_direction[k]) + "\n";
    files["ncp.csv"] = csv;
    summary = {{"points", r.points},     {"centers", r.centers},         {"radii", r.radii},
               {"global_min", r.global_min}, {"modulus_min", r.modulus_min}, {"per_direction", r.per_direction}};
    files["ncp.json"] = summary.dump(2) + "\n";
  }

  void doubling() {
    auto mu = measure(o_.delta > 0.0 ? o_.delta : delta());
    if (o_.piece >= 0) mu = restrict_to_piece(mu, scheme(), o_.piece);
    const auto r = doubling_probe(mu, parse_list(o_.radii), o_.centers, o_.seed);
    std::string csv = "bin_lo,bin_hi,count\n";
    for (std::size_t k = 0; k < r.histogram.size(); ++k)
      csv += fmt(r.bin_edges[k]) + "," + fmt(r.bin_edges[k + 1]) + "," + std::to_string(r.histogram[k]) + "\n";
    files["doubling.csv"] = csv;
    summary = {{"max_ratio", r.max_ratio}, {"min_ratio", r.min_ratio}, {"radii", r.radii},
               {"samples", r.samples},     {"resolution", r.resolution}};
    files["doubling.json"] = summary.dump(2) + "\n";
  }

 private:
  const Options& o_;
  RationalMap map_;
  Tolerances tol_;
  std::optional<CodingScheme> scheme_;
  std::optional<OrbitDatabase> db_;
  std::optional<double> delta_;
};

void add_flags(CLI::App& app, Options& o) {
  app.add_option("--map", o.map, "map JSON file or built-in name (z2, z2m6, z2p5, z2p2p2i)");
  app.add_option("--coding", o.coding, "coding JSON file, 'full', or a built-in coding name");
  app.add_option("--out-dir", o.out_dir, "directory for every output file");
  app.add_option("--threads", o.threads, "worker threads (default: hardware parallelism)");
  app.add_option("--seed", o.seed, "seed for sampled probe centres");
  app.add_option("--tol", o.tol, "point and merge tolerance")->check(CLI::PositiveNumber);
  app.add_option("--db", o.db, "load an orbit database prefix instead of building one");
  app.add_option("--nmax", o.nmax, "largest period enumerated")->check(CLI::Range(1, 40));
  app.add_option("--backend", o.backend, "auto, roots, symbolic or both")
      ->check(CLI::IsMember({"auto", "roots", "symbolic", "both"}));
}

}  // namespace

CliResult run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, bool write) {
  const auto start = std::chrono::steady_clock::now();
  CliResult result;
  Options o;
  CLI::App app{"Primitive periodic orbits, dimension, zeta functions and probes for hyperbolic rational maps",
               "primeorbits"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  add_flags(app, o);
  auto* orbits = app.add_subcommand(
      "orbits", "enumerate primitive orbits; orbits.csv columns: period,re,im,re_lambda,im_lambda,abs_lambda,angle,"
                "backend; agreement.csv (backend both): period,roots_count,symbolic_count,hausdorff");
  auto* dimension = app.add_subcommand(
      "dimension", "estimate delta; dimension.csv columns: method,n,delta_n (n is the operator depth for the "
                   "eigenvalue method)");
  dimension->add_option("--nmin", o.nmin, "first level of the periodic-orbit estimate");
  dimension->add_option("--method", o.method, "orbits, eigen or both")
      ->check(CLI::IsMember({"orbits", "eigen", "both"}));
  dimension->add_option("--depth", o.depth, "transfer operator depth");
  auto* zeta = app.add_subcommand(
      "zeta", "scan log zeta(s, ell) on a grid; zeta_l<ell>.csv columns: a,b,ell,re_logzeta,im_logzeta,abs_zeta,valid");
  zeta->add_option("--ell", o.ells, "characters to scan (repeatable)");
  zeta->add_option("--rect", o.rect, "a0:a1:b0:b1 (default [delta-0.02, delta+0.05] x [-10, 10])");
  zeta->add_option("--step", o.step, "grid step")->check(CLI::PositiveNumber);
  zeta->add_option("--trust-tol", o.trust_tol, "tail estimate accepted as trusted");
  zeta->add_option("--delta", o.delta, "use this delta instead of estimating it");
  auto* count = app.add_subcommand("count", "N_t against Li(t^delta); count.csv columns: t,N_t,li_t_delta,rel_error,small_t");
  count->add_option("--tgrid", o.tgrid, "log:a:b:k, lin:a:b:k or a comma list; 'h' is the horizon");
  count->add_option("--delta", o.delta, "use this delta instead of estimating it");
  auto* equidist = app.add_subcommand(
      "equidist", "Weyl sums pi_ell(t); weyl.csv columns: t,ell,re_pi,im_pi,N_t,normalized");
  equidist->add_option("--lmax", o.lmax, "largest |ell|");
  equidist->add_option("--tgrid", o.tgrid, "as for count (default log:10:h:20)");
  equidist->add_option("--delta", o.delta, "use this delta instead of estimating it");

  auto* probe = app.add_subcommand("probe", "numerical probes");
  probe->require_subcommand(1);
  probe->fallthrough();
  auto* decay = probe->add_subcommand("decay", "L^2 decay of the normalised operator; decay.csv columns: b,ell,k,log_norm");
  decay->add_option("--b", o.b, "imaginary parts (repeatable)");
  decay->add_option("--ell", o.ell, "character");
  decay->add_option("--steps", o.steps, "operator iterations");
  decay->add_option("--depth", o.depth, "transfer operator depth");
  decay->add_option("--level", o.level, "period of the points carrying the measure");
  decay->add_option("--delta", o.delta, "real part of s (default: eigenvalue estimate)");
  auto* nli = probe->add_subcommand("nli", "Jacobian of the branch-difference map; writes nli.json");
  nli->add_option("--word1", o.word1, "comma separated symbols, outermost first");
  nli->add_option("--word2", o.word2, "comma separated symbols, outermost first");
  nli->add_option("--center", o.center, "re,im of the grid centre");
  nli->add_option("--half-width", o.half_width, "grid half width");
  nli->add_option("--count", o.count, "points per grid side");
  auto* ncp = probe->add_subcommand("ncp", "non-concentration; ncp.csv columns: direction,delta1");
  ncp->add_option("--prefix", o.prefix, "cylinder prefix word");
  ncp->add_option("--depth", o.depth, "extra symbols below the prefix");
  ncp->add_option("--directions", o.directions, "test directions on the half circle");
  ncp->add_option("--radii", o.radii, "comma list (default: geometric)");
  ncp->add_option("--centers", o.centers, "sampled centres");
  auto* doubling = probe->add_subcommand(
      "doubling", "doubling ratios of the equilibrium measure; doubling.csv columns: bin_lo,bin_hi,count");
  doubling->add_option("--level", o.level, "period of the points carrying the measure");
  doubling->add_option("--radii", o.radii, "comma list (default: geometric)");
  doubling->add_option("--centers", o.centers, "sampled centres");
  doubling->add_option("--piece", o.piece, "restrict to one piece of the coding");
  doubling->add_option("--delta", o.delta, "exponent of the weights (default: estimated)");

  std::vector<std::string> argv_store{"primeorbits"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());

  auto report = [&](int code, std::string_view kind, const std::string& message) {
    err << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << "\n";
    result.exit_code = code;
    result.files.clear();
    return result;
  };

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return result;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return result;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return result;
  } catch (const CLI::ParseError& e) {
    return report(2, "ParseError", e.what());
  }

  const unsigned previous_threads = thread_count();
  set_thread_count(o.threads > 0 ? o.threads : std::max(1u, std::thread::hardware_concurrency()));
  std::string command;
  try {
    Runner r(o);
    if (orbits->parsed()) {
      command = "orbits";
      r.orbits();
    } else if (dimension->parsed()) {
      command = "dimension";
      r.dimension();
    } else if (zeta->parsed()) {
      command = "zeta";
      r.zeta();
    } else if (count->parsed()) {
      command = "count";
      r.count();
    } else if (equidist->parsed()) {
      command = "equidist";
      r.equidist();
    } else if (decay->parsed()) {
      command = "probe decay";
      r.decay();
    } else if (nli->parsed()) {
      command = "probe nli";
      r.nli();
    } else if (ncp->parsed()) {
      command = "probe ncp";
      r.ncp();
    } else if (doubling->parsed()) {
      command = "probe doubling";
      r.doubling();
    }
    result.files = std::move(r.files);

    json manifest;
    std::string cmdline = "primeorbits";
    for (const auto& a : args) cmdline += " " + a;
    manifest["command_line"] = cmdline;
    manifest["command"] = command;
    manifest["map"] = json::parse(r.map().to_json());
    manifest["map_hash"] = r.map().hash();
    manifest["tolerances"] = {{"point", r.tol().point}, {"merge", r.tol().merge}};
    manifest["seed"] = o.seed;
    manifest["threads"] = thread_count();
    manifest["versions"] = {{"primeorbits", kVersion}, {"compiler", __VERSION__}};
    json digests = json::object();
    for (const auto& [name, content] : result.files) {
      result.digests[name] = sha256_hex(content);
      digests[name] = result.digests[name];
    }
    manifest["outputs"] = digests;
    manifest["wall_time_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.files["run_manifest.json"] = manifest.dump(2) + "\n";

    if (write) {
      std::error_code ec;
      fs::create_directories(o.out_dir, ec);
      if (ec) fail(ErrorKind::IoError, "cannot create " + o.out_dir + ": " + ec.message());
      for (const auto& [name, content] : result.files) {
        std::ofstream f(fs::path(o.out_dir) / name, std::ios::binary);
        if (!f || !(f << content)) fail(ErrorKind::IoError, "cannot write " + name);
      }
    }
    out << r.summary.dump(2) << "\n";
  } catch (const Error& e) {
    set_thread_count(previous_threads);
    return report(is_validation_error(e.kind()) ? 2 : 3, to_string(e.kind()), e.what());
  } catch (const std::exception& e) {
    set_thread_count(previous_threads);
    return report(3, "InternalError", e.what());
  }
  set_thread_count(previous_threads);
  return result;
}

}  // namespace primeorbits
