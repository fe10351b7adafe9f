#include "cli.hpp"

#include <cstdlib>
#include <ctime>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "chaoskit/classical_moments.hpp"
#include "chaoskit/distributions.hpp"
#include "chaoskit/error.hpp"
#include "chaoskit/experiments.hpp"
#include "chaoskit/free_moments.hpp"
#include "chaoskit/io.hpp"
#include "chaoskit/kernels.hpp"
#include "chaoskit/parallel.hpp"
#include "chaoskit/partitions.hpp"

namespace chaoskit::cli {

namespace {

using ojson = nlohmann::ordered_json;

struct Settings {
  std::optional<unsigned> workers;
  bool timestamp = false;

  // family / kernel
  std::string family;
  int n = 0;
  int d = 2;
  std::optional<std::uint64_t> seed;
  std::string output;
  std::string kernel_path;

  // partitions / examples
  std::string klass = "pairings";
  int k = 0;
  int m = 0;
  bool noncrossing = false;
  std::string q;

  // laws and moments
  std::string name;
  std::string dist;
  std::string free_dist;
  int order = 4;
  std::string engine = "auto";
  std::uint64_t samples = 100000;

  // scans
  std::string n_grid;
  bool allow_outside = false;
  std::string csv;
  std::string kernels;
  std::string vectors;
  std::string side = "classical";
  std::optional<double> eps;
};

std::string resolve_timestamp(bool wanted) {
  const char* epoch = std::getenv("SOURCE_DATE_EPOCH");
  if (!wanted && !epoch) return {};
  std::time_t t = epoch ? static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10)) : std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<int> parse_grid(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      int v = std::stoi(item, &used);
      if (used != item.size() || v <= 0) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw Error(ErrorCode::UsageError, "bad --n-grid entry '" + item + "'");
    }
  }
  if (out.empty()) throw Error(ErrorCode::UsageError, "--n-grid is empty");
  return out;
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

ojson moment_json(const MomentResult& r) {
  ojson j;
  j["value"] = number_to_json(r.value);
  j["exact"] = r.value.is_exact();
  j["order"] = r.order;
  j["engine"] = r.engine;
  j["work"] = r.work;
  j["std_error"] = r.std_error ? ojson(*r.std_error) : ojson(nullptr);
  return j;
}

ojson kernel_stats(const Kernel& k) {
  auto prof = influence_profile(k);
  ojson j;
  j["n"] = k.n();
  j["d"] = k.degree();
  j["entries"] = k.size();
  j["exact"] = k.is_exact();
  ojson per = ojson::array();
  for (const auto& x : prof.per_index) per.push_back(number_to_json(x));
  j["influences"] = per;
  j["tau"] = number_to_json(prof.tau);
  j["normalization_residual"] = normalization_residual(k);
  return j;
}

void emit(std::ostream& out, const ojson& j) { out << j.dump(2) << '\n'; }

void emit_report(const Settings& s, const ScanReport& r, std::ostream& out) {
  if (!s.output.empty()) {
    write_file(s.output, r.to_json());
  } else {
    out << r.to_json();
  }
  if (!s.csv.empty()) write_file(s.csv, r.to_csv());
}

ScanOptions scan_options(const Settings& s, unsigned workers) {
  ScanOptions o;
  o.n_grid = parse_grid(s.n_grid);
  o.d = s.d;
  o.seed = s.seed;
  o.workers = workers;
  o.allow_outside = s.allow_outside;
  if (auto t = resolve_timestamp(s.timestamp); !t.empty()) o.timestamp = t;
  return o;
}

bool is_free_law_name(const std::string& name) {
  return name == "semicircular" || name == "tetilla" || name.rfind("freepoisson:", 0) == 0 ||
         name.rfind("qgauss:", 0) == 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Settings s;
  CLI::App app{"Fourth-moment and universality experiments for homogeneous sums", "chaoskit"};
  app.require_subcommand(1);
  app.add_option("--workers", s.workers, "worker threads (default: CHAOSKIT_WORKERS or 1)")->check(CLI::PositiveNumber);
  app.add_flag("--timestamp", s.timestamp, "record the current UTC time (or SOURCE_DATE_EPOCH) in report meta");

  std::function<void(unsigned)> action;

  // kernel
  auto* kernel = app.add_subcommand("kernel", "generate and inspect kernels")->require_subcommand(1);
  auto* kgen = kernel->add_subcommand("gen", "build a family kernel");
  kgen->add_option("--family", s.family, "constant|disjoint_pairs|concentrated|random_dense")->required();
  kgen->add_option("--n", s.n, "ground size")->required();
  kgen->add_option("--d", s.d, "degree");
  kgen->add_option("--seed", s.seed, "seed (random_dense)");
  kgen->add_option("-o,--output", s.output, "kernel file to write");
  kgen->callback([&] {
    action = [&](unsigned) {
      Kernel k = family(parse_family(s.family), s.n, s.d, s.seed);
      ojson j = kernel_stats(k);
      if (!s.output.empty()) {
        save_kernel(k, s.output);
        j["file"] = s.output;
      } else {
        j["kernel"] = kernel_to_json(k);
      }
      emit(out, j);
    };
  });
  auto* kstats = kernel->add_subcommand("stats", "influences and tau of a kernel file");
  kstats->add_option("file", s.kernel_path, "kernel JSON")->required();
  kstats->callback([&] { action = [&](unsigned) { emit(out, kernel_stats(load_kernel(s.kernel_path))); }; });

  // partitions
  auto* parts = app.add_subcommand("partitions", "partition and pairing counts")->require_subcommand(1);
  auto* pcount = parts->add_subcommand("count", "count a partition class of [k]");
  pcount->add_option("--class", s.klass, "pairings|nc-pairings|nc-partitions")
      ->check(CLI::IsMember({"pairings", "nc-pairings", "nc-partitions"}));
  pcount->add_option("--k", s.k, "ground size")->required();
  pcount->callback([&] {
    action = [&](unsigned workers) {
      std::uint64_t v = s.klass == "pairings"      ? count_pairings(s.k, workers)
                        : s.klass == "nc-pairings" ? count_nc_pairings(s.k)
                                                   : count_nc_partitions(s.k);
      out << v << '\n';
    };
  });
  auto* pstar = parts->add_subcommand("star", "pairings of k x 4 with no pair inside a row");
  pstar->add_option("--k", s.k, "row length")->required();
  pstar->add_flag("--noncrossing", s.noncrossing, "non-crossing pairings only");
  pstar->callback([&] { action = [&](unsigned) { out << count_star_pairings(s.k, s.noncrossing).get_str() << '\n'; }; });

  // dist
  auto* dist = app.add_subcommand("dist", "law tables")->require_subcommand(1);
  auto* dshow = dist->add_subcommand("show", "moments (and free cumulants) of a law");
  dshow->add_option("name", s.name, "law name or .json file")->required();
  dshow->add_flag("--free", s.noncrossing, "read a .json file as a free law");
  dshow->callback([&] {
    action = [&](unsigned) {
      bool free_side = is_free_law_name(s.name) || s.noncrossing;
      emit(out, free_side ? free_law_to_json(resolve_free_law(s.name))
                          : classical_law_to_json(resolve_classical_law(s.name)));
    };
  });
  auto* dkurt = dist->add_subcommand("kurtosis", "chi4 = m4 - 3 or kappa4 = m4 - 2");
  dkurt->add_option("name", s.name, "law name or .json file")->required();
  dkurt->add_flag("--free", s.noncrossing, "read a .json file as a free law");
  dkurt->callback([&] {
    action = [&](unsigned) {
      ojson j;
      j["name"] = s.name;
      if (is_free_law_name(s.name) || s.noncrossing) {
        auto law = resolve_free_law(s.name);
        j["kappa4"] = kappa4(law).str();
        j["outside_theorem_class"] = law.outside_theorem_class();
      } else {
        auto law = resolve_classical_law(s.name);
        j["chi4"] = chi4(law).str();
        j["outside_theorem_class"] = law.outside_theorem_class();
      }
      emit(out, j);
    };
  });

  // examples
  auto* ex = app.add_subcommand("examples", "closed-form checks")->require_subcommand(1);
  auto* eh = ex->add_subcommand("hermite", "E[He_k(N)^m] by star pairings and by expansion");
  eh->add_option("--k", s.k, "polynomial degree")->required();
  eh->add_option("--m", s.m, "power")->required();
  eh->callback([&] {
    action = [&](unsigned) {
      out << hermite_moment(s.k, s.m).get_str() << '\n';
      out << "expansion = " << hermite_moment_by_expansion(s.k, s.m).get_str() << '\n';
    };
  });
  auto* ec = ex->add_subcommand("chebyshev", "phi(U_k(S)^m) by non-crossing star pairings and by expansion");
  ec->add_option("--k", s.k, "polynomial degree")->required();
  ec->add_option("--m", s.m, "power")->required();
  ec->callback([&] {
    action = [&](unsigned) {
      out << chebyshev_moment(s.k, s.m).get_str() << '\n';
      out << "expansion = " << chebyshev_moment_by_expansion(s.k, s.m).get_str() << '\n';
    };
  });
  auto* et = ex->add_subcommand("tetilla", "moments of (S1 S2 + S2 S1)/sqrt(2)");
  et->add_option("--m", s.m, "moment order")->required();
  et->callback([&] {
    action = [&](unsigned) {
      out << to_string(tetilla_moment(s.m)) << '\n';
      if (s.m == 4) out << "kappa4 = " << to_string(tetilla_moment(4) - 2) << '\n';
    };
  });
  auto* eq = ex->add_subcommand("qgauss", "q-Gaussian moments as a polynomial in q");
  eq->add_option("--m", s.m, "moment order")->required();
  eq->add_option("--q", s.q, "evaluate at q (rational or decimal)");
  eq->callback([&] {
    action = [&](unsigned) {
      auto poly = qgauss_polynomial(s.m);
      if (!s.q.empty()) {
        Rational q = parse_rational(s.q);
        Rational v = qgauss_moment(s.m, q);
        out << to_string(v) << '\n';
        if (s.m == 4) out << "kappa4 = " << to_string(v - 2) << '\n';
      }
      std::string text;
      for (std::size_t j = 0; j < poly.size(); ++j) {
        if (poly[j] == 0) continue;
        if (!text.empty()) text += " + ";
        std::string c = poly[j].get_str();
        if (j == 0) text += c;
        else text += (c == "1" ? "" : c + "*") + (j == 1 ? std::string("q") : "q^" + std::to_string(j));
      }
      out << "polynomial = " << (text.empty() ? "0" : text) << '\n';
    };
  });

  // moment
  auto* mom = app.add_subcommand("moment", "moments of a homogeneous sum")->require_subcommand(1);
  auto* mc = mom->add_subcommand("classical", "E[Q_X(f)^M]");
  mc->add_option("--kernel", s.kernel_path, "kernel JSON")->required();
  mc->add_option("--dist", s.dist, "law name or .json file")->required();
  mc->add_option("--order", s.order, "moment order M")->required();
  mc->add_option("--engine", s.engine, "auto|brute|partition|mc")->check(CLI::IsMember({"auto", "brute", "partition", "mc"}));
  mc->add_option("--samples", s.samples, "Monte-Carlo samples");
  mc->add_option("--seed", s.seed, "Monte-Carlo seed");
  mc->callback([&] {
    action = [&](unsigned workers) {
      Kernel k = load_kernel(s.kernel_path);
      ClassicalDist law = resolve_classical_law(s.dist);
      auto monte_carlo = [&] {
        if (!s.seed) throw Error(ErrorCode::UsageError, "the Monte-Carlo engine needs --seed");
        return mc_moment(k, law, s.order, s.samples, *s.seed, workers);
      };
      MomentResult r;
      if (s.engine == "brute") {
        r = exact_moment_bruteforce(k, law, s.order);
      } else if (s.engine == "partition") {
        r = exact_moment_partition(k, law, s.order, workers);
      } else if (s.engine == "mc") {
        r = monte_carlo();
      } else {
        try {
          r = exact_moment_partition(k, law, s.order, workers);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::TooLarge || !s.seed) throw;
          r = monte_carlo();
        }
      }
      ojson j = moment_json(r);
      j["law"] = law.name;
      emit(out, j);
    };
  });
  auto* mf = mom->add_subcommand("free", "phi(Q_Y(f)^M)");
  mf->add_option("--kernel", s.kernel_path, "kernel JSON")->required();
  mf->add_option("--dist", s.dist, "free law name or .json file")->required();
  mf->add_option("--order", s.order, "moment order M")->required();
  mf->add_option("--engine", s.engine, "auto|general|pairing")->check(CLI::IsMember({"auto", "general", "pairing"}));
  mf->callback([&] {
    action = [&](unsigned workers) {
      Kernel k = load_kernel(s.kernel_path);
      FreeDist law = resolve_free_law(s.dist);
      bool pairing = s.engine == "pairing" || (s.engine == "auto" && law.name == "semicircular");
      if (pairing && law.name != "semicircular") {
        throw Error(ErrorCode::UsageError, "the pairing engine needs the semicircular law");
      }
      MomentResult r = pairing ? semicircular_sum_moment(k, s.order, workers) : free_sum_moment(k, law, s.order, workers);
      ojson j = moment_json(r);
      j["law"] = law.name;
      emit(out, j);
    };
  });

  // scan
  auto* scan = app.add_subcommand("scan", "n-grid experiments")->require_subcommand(1);
  auto add_grid_options = [&](CLI::App* c) {
    c->add_option("--family", s.family, "kernel family")->required();
    c->add_option("--n-grid", s.n_grid, "comma-separated ground sizes")->required();
    c->add_option("--d", s.d, "degree");
    c->add_option("--seed", s.seed, "seed (random_dense)");
    c->add_flag("--allow-outside", s.allow_outside, "accept laws outside the theorem class");
    c->add_option("-o,--output", s.output, "report JSON");
    c->add_option("--csv", s.csv, "report CSV");
  };
  auto* scrit = scan->add_subcommand("criterion", "fourth-moment criterion along n");
  add_grid_options(scrit);
  scrit->add_option("--dist", s.dist, "law")->required();
  scrit->add_option("--side", s.side, "classical|free")->check(CLI::IsMember({"classical", "free"}));
  scrit->callback([&] {
    action = [&](unsigned workers) {
      auto opt = scan_options(s, workers);
      Family f = parse_family(s.family);
      bool free_side = s.side == "free";
      emit_report(s, free_side ? criterion_scan(f, resolve_free_law(s.dist), opt)
                               : criterion_scan(f, resolve_classical_law(s.dist), opt), out);
    };
  });
  auto* sinv = scan->add_subcommand("invariance", "|E[Q_X^4] - E[Q_N^4]| / sqrt(tau) along n");
  add_grid_options(sinv);
  sinv->add_option("--dist", s.dist, "classical law")->required();
  sinv->callback([&] {
    action = [&](unsigned workers) {
      emit_report(s, invariance_ratio(parse_family(s.family), resolve_classical_law(s.dist), scan_options(s, workers)),
                  out);
    };
  });
  auto* strans = scan->add_subcommand("transfer", "classical and free gaps along n");
  add_grid_options(strans);
  strans->add_option("--dist", s.dist, "classical law")->required();
  strans->add_option("--free-dist", s.free_dist, "free law")->required();
  strans->callback([&] {
    action = [&](unsigned workers) {
      emit_report(s, transfer_scan(parse_family(s.family), resolve_classical_law(s.dist), resolve_free_law(s.free_dist),
                                   scan_options(s, workers)),
                  out);
    };
  });
  auto* sjoint = scan->add_subcommand("joint", "mixed moments of a kernel vector against Wick targets");
  auto* kopt = sjoint->add_option("--kernels", s.kernels, "comma-separated kernel files (one vector)");
  auto* vopt = sjoint->add_option("--vectors", s.vectors, "vector family: disjoint_blocks|overlap_half");
  kopt->excludes(vopt);
  sjoint->add_option("--n-grid", s.n_grid, "ground sizes for --vectors");
  sjoint->add_option("--side", s.side, "classical|free")->check(CLI::IsMember({"classical", "free"}));
  sjoint->add_option("--dist", s.dist, "law (default gaussian or semicircular)");
  sjoint->add_option("--order", s.order, "total degree K (2..4)");
  sjoint->add_option("--eps", s.eps, "tolerance for joint_matches_wick");
  sjoint->add_option("-o,--output", s.output, "report JSON");
  sjoint->add_option("--csv", s.csv, "report CSV");
  sjoint->callback([&] {
    action = [&](unsigned workers) {
      std::vector<VectorSpec> specs;
      if (!s.kernels.empty()) {
        std::vector<Kernel> ks;
        for (const auto& path : split(s.kernels)) ks.push_back(load_kernel(path));
        specs.emplace_back(std::move(ks));
      } else if (!s.vectors.empty()) {
        if (s.n_grid.empty()) throw Error(ErrorCode::UsageError, "--vectors needs --n-grid");
        for (int n : parse_grid(s.n_grid)) specs.push_back(vector_family(s.vectors, n));
      } else {
        throw Error(ErrorCode::UsageError, "give --kernels or --vectors");
      }
      JointOptions opt;
      opt.order = s.order;
      opt.eps = s.eps;
      opt.workers = workers;
      if (auto t = resolve_timestamp(s.timestamp); !t.empty()) opt.timestamp = t;
      bool free_side = s.side == "free";
      std::string law = s.dist.empty() ? (free_side ? "semicircular" : "gaussian") : s.dist;
      emit_report(s, free_side ? joint_vs_componentwise(specs, resolve_free_law(law), opt)
                               : joint_vs_componentwise(specs, resolve_classical_law(law), opt), out);
    };
  });

  auto error_json = [&](std::string_view code, const std::string& message) {
    ojson j;
    j["error"] = code;
    j["message"] = message;
    err << j.dump() << '\n';
  };

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    error_json(code_name(ErrorCode::UsageError), e.what());
    return 2;
  }
  try {
    if (!action) throw Error(ErrorCode::UsageError, "no command given");
    action(resolve_workers(s.workers));
  } catch (const Error& e) {
    error_json(code_name(e.code()), e.what());
    return e.code() == ErrorCode::IoError ? 1 : 2;
  } catch (const std::exception& e) {
    error_json("InternalError", e.what());
    return 2;
  }
  return 0;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace chaoskit::cli
