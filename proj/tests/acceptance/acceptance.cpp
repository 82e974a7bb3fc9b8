// One PASS/FAIL line per acceptance criterion. Exit status is nonzero if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <unistd.h>
#include <vector>

#include "iwsim/cli/commands.hpp"
#include "iwsim/cli/config.hpp"
#include "iwsim/core/rng.hpp"
#include "iwsim/core/simulator.hpp"
#include "iwsim/loc/server.hpp"
#include "iwsim/loc/trilateration.hpp"
#include "iwsim/mac/access.hpp"
#include "iwsim/mac/sweep.hpp"
#include "iwsim/nlos/dataset.hpp"
#include "iwsim/nlos/evaluate.hpp"
#include "iwsim/nlos/features.hpp"
#include "iwsim/phy/ber.hpp"
#include "iwsim/phy/channel.hpp"
#include "iwsim/phy/frame.hpp"
#include "iwsim/phy/gfdm.hpp"
#include "iwsim/phy/sync.hpp"

namespace fs = std::filesystem;
using namespace iwsim;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [not met]");
  }
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

unsigned workers() { return std::max(1U, std::thread::hardware_concurrency()); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

mac::Scenario mac_base(mac::Access access, mac::SchedulerKind sched = mac::SchedulerKind::Reference) {
  mac::Scenario s;
  s.access = access;
  s.scheduler = sched;
  s.duration = std::chrono::seconds(30);
  return s;
}

// Smallest n whose value crosses the limit, or -1.
int first_exceeding(const std::vector<mac::SweepPoint>& pts, const std::function<double(const mac::SweepPoint&)>& v,
                    double limit) {
  for (const auto& p : pts) {
    if (v(p) > limit) return p.n_ar;
  }
  return -1;
}

// ---------------------------------------------------------------------------

Outcome hcca_safety() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto pts = mac::sweep(mac_base(mac::Access::HCCA), mac::PhyParams{}, mac::IntRange{5, 50, 5}, workers());
  double worst = 0.0;
  std::uint64_t misses = 0;
  for (const auto& p : pts) {
    worst = std::max(worst, p.stats.safety.max_ms);
    misses += p.stats.safety.deadline_misses;
  }
  const double t = seconds_since(t0);
  o.require(worst <= 8.0, "safety max " + fmt("%.3f", worst) + " ms over n_ar 5..50");
  o.require(misses == 0, "misses " + std::to_string(misses));
  o.require(t < 120.0, "sweep " + fmt("%.1f", t) + " s");
  return o;
}

Outcome access_ordering() {
  Outcome o;
  double max_ms[3];
  const mac::Access acc[3] = {mac::Access::DCF, mac::Access::PCF, mac::Access::HCCA};
  for (int i = 0; i < 3; ++i) {
    const auto pts = mac::sweep(mac_base(acc[i]), mac::PhyParams{}, mac::IntRange{20, 20, 1});
    max_ms[i] = pts.at(0).stats.safety.max_ms;
  }
  o.require(max_ms[0] > max_ms[1], "n_ar 20 safety max: DCF " + fmt("%.3f", max_ms[0]) + " > PCF " + fmt("%.3f", max_ms[1]));
  o.require(max_ms[0] > 8.0 && max_ms[1] > 8.0, "both above 8 ms");
  o.require(max_ms[2] <= 8.0, "HCCA " + fmt("%.3f", max_ms[2]) + " <= 8");
  return o;
}

Outcome hcca_capacity() {
  Outcome o;
  const auto pts = mac::sweep(mac_base(mac::Access::HCCA), mac::PhyParams{}, mac::IntRange{1, 50, 1}, workers());
  const int cross = first_exceeding(pts, [](const mac::SweepPoint& p) { return p.stats.ar.max_ms; }, 50.0);
  o.require(cross >= 25 && cross <= 40, "AR max exceeds 50 ms first at n_ar " + std::to_string(cross));
  return o;
}

Outcome pcf_crossover() {
  Outcome o;
  const auto pts = mac::sweep(mac_base(mac::Access::PCF), mac::PhyParams{}, mac::IntRange{1, 20, 1}, workers());
  const int max_cross = first_exceeding(pts, [](const mac::SweepPoint& p) { return p.stats.safety.max_ms; }, 8.0);
  const int mean_cross = first_exceeding(pts, [](const mac::SweepPoint& p) { return p.stats.safety.mean_ms; }, 8.0);
  // Suitability bound: last count whose mean stays within the MSI.
  const int suitable = mean_cross < 0 ? 20 : mean_cross - 1;
  o.require(max_cross >= 4 && max_cross <= 10, "safety max exceeds 8 ms first at n_ar " + std::to_string(max_cross));
  o.require(suitable >= 8 && suitable <= 16, "mean within 8 ms up to n_ar " + std::to_string(suitable));
  return o;
}

Outcome edf_vs_reference() {
  Outcome o;
  const mac::IntRange range{5, 60, 5};
  auto scenario = [](mac::SchedulerKind k) {
    mac::Scenario s = mac_base(mac::Access::HCCA, k);
    s.safety.msi = std::chrono::milliseconds(24);
    return s;
  };
  const auto edf = mac::sweep(scenario(mac::SchedulerKind::EDF), mac::PhyParams{}, range, workers());
  const auto ref = mac::sweep(scenario(mac::SchedulerKind::Reference), mac::PhyParams{}, range, workers());
  auto fails = [](const mac::SweepPoint& p) { return p.stats.ar.deadline_misses > 0 || p.stats.admission_failed(); };
  auto capacity = [&](const std::vector<mac::SweepPoint>& pts, int& first_fail) {
    int cap = 0;
    first_fail = -1;
    for (const auto& p : pts) {
      if (fails(p)) {
        first_fail = p.n_ar;
        break;
      }
      cap = p.n_ar;
    }
    return cap;
  };
  int edf_fail = 0, ref_fail = 0;
  const int edf_cap = capacity(edf, edf_fail);
  capacity(ref, ref_fail);
  o.require(edf_cap >= 45, "EDF meets all AR deadlines up to n_ar " + std::to_string(edf_cap));
  const bool ref_smaller = ref_fail > 0 && (edf_fail < 0 || ref_fail < edf_fail);
  o.require(ref_smaller, "reference fails first at n_ar " + std::to_string(ref_fail) + ", EDF at " +
                             (edf_fail < 0 ? std::string("none") : std::to_string(edf_fail)));

  std::vector<double> x, y;
  for (const auto& p : edf) {
    if (p.n_ar > edf_cap) break;
    x.push_back(p.n_ar);
    y.push_back(p.stats.ar.max_ms);
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  const double r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 0.0;
  o.require(x.size() >= 3 && r2 >= 0.9, "EDF AR max linear fit R^2 " + fmt("%.4f", r2));
  return o;
}

Outcome dcf_oracle() {
  Outcome o;
  mac::Scenario s;
  s.access = mac::Access::DCF;
  s.n_safety = 1;
  s.n_ar = 0;
  s.duration = std::chrono::seconds(81);
  const mac::PhyParams phy;
  const mac::LatencyStats st = mac::run_dcf(s, phy);
  const double oracle = to_ms(phy.difs) + phy.cw_min / 2.0 * to_ms(phy.slot) + to_ms(phy.data_exchange(s.safety.burst_bytes));
  const double rel = std::abs(st.safety.mean_ms / oracle - 1.0);
  o.require(st.safety.samples >= 10000, std::to_string(st.safety.samples) + " packets");
  o.require(rel <= 0.01, "mean " + fmt("%.6f", st.safety.mean_ms) + " ms vs oracle " + fmt("%.6f", oracle) +
                             " ms (" + fmt("%.3f", 100.0 * rel) + "%)");
  return o;
}

// ---------------------------------------------------------------------------

std::vector<phy::GfdmConfig> shipped_phy_configs() {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(fs::path(IWSIM_SOURCE_DIR) / "configs" / "phy")) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<phy::GfdmConfig> out;
  for (const auto& f : files) out.push_back(cli::gfdm_config(cli::load_config(f.string(), cli::Section::Phy)));
  return out;
}

phy::ResourceGrid random_grid(const phy::GfdmConfig& c, Rng& rng) {
  std::vector<std::uint8_t> bits(c.active_set().size() * static_cast<std::size_t>(c.M) *
                                 static_cast<std::size_t>(phy::bits_per_symbol(c.constellation)));
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng.next_u64() & 1U);
  return phy::map_resources(phy::map_bits(bits, c.constellation), c);
}

Outcome gfdm_correctness() {
  Outcome o;
  Rng rng(1);
  double zf_err = 0.0;
  std::size_t n_cfg = 0;
  for (phy::GfdmConfig c : shipped_phy_configs()) {
    c.receiver = phy::Receiver::ZeroForcing;
    const phy::GfdmModem modem(c);
    for (int t = 0; t < 20; ++t) {
      const phy::ResourceGrid g = random_grid(c, rng);
      zf_err = std::max(zf_err, (modem.demodulate(modem.modulate(g)).d - g.d).cwiseAbs().maxCoeff());
    }
    ++n_cfg;
  }
  o.require(zf_err <= 1e-9, "ZF round trip max error " + fmt("%.2e", zf_err) + " over " + std::to_string(n_cfg) + " configs");

  double idft_err = 0.0;
  for (int K : {4, 16, 64}) {
    phy::GfdmConfig c;
    c.K = K;
    c.M = 1;
    c.pulse = phy::PulseShape::Rect;
    c.cp_len = 0;
    const phy::ResourceGrid g = random_grid(c, rng);
    const phy::CVector x = phy::gfdm_modulate(g, c);
    for (int n = 0; n < K; ++n) {
      phy::Complex ref(0, 0);
      for (int k = 0; k < K; ++k) {
        ref += g.d(k, 0) * std::polar(1.0, 2.0 * M_PI * k * n / K);
      }
      idft_err = std::max(idft_err, std::abs(x[n] - ref / std::sqrt(static_cast<double>(K))));
    }
  }
  o.require(idft_err <= 1e-12, "M=1 Rect vs inverse DFT " + fmt("%.2e", idft_err));

  const auto t0 = std::chrono::steady_clock::now();
  phy::GfdmConfig ofdm;
  ofdm.K = 64;
  ofdm.M = 1;
  ofdm.pulse = phy::PulseShape::Rect;
  ofdm.constellation = phy::Constellation::QPSK;
  phy::BerOptions genie;
  genie.genie_sync = true;
  genie.genie_channel = true;
  std::uint64_t i = 0;
  for (double ebn0 : {0.0, 4.0, 8.0}) {
    const phy::ChannelModel ch = phy::ChannelModel::awgn(phy::snr_db_from_ebn0(ebn0, ofdm.constellation));
    const phy::BerResult r = phy::ber_run(ofdm, ch, 1'000'000, derive_seed(1, i++), genie);
    const double p = phy::q_function(std::sqrt(2.0 * std::pow(10.0, ebn0 / 10.0)));
    const double ci = 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(r.bits));
    o.require(std::abs(r.ber - p) <= ci, "Eb/N0 " + fmt("%.0f", ebn0) + " dB BER " + fmt("%.5f", r.ber) + " vs " +
                                             fmt("%.5f", p) + " +- " + fmt("%.5f", ci));
  }
  const double t = seconds_since(t0);
  o.require(t <= 60.0, "BER " + fmt("%.1f", t) + " s");
  return o;
}

Outcome schmidl_cox() {
  Outcome o;
  Rng rng(2);
  double cfo_err = 0.0;
  int timing_wrong = 0, cases = 0;
  for (const phy::GfdmConfig& c : shipped_phy_configs()) {
    const phy::Frame f = phy::build_frame(phy::gfdm_modulate(random_grid(c, rng), c), c);
    for (int delay : {0, 7, 50, 123}) {
      for (double cfo : {0.0, 0.2, -0.45}) {
        phy::ChannelModel ch = phy::ChannelModel::ideal();
        ch.delay = delay;
        ch.cfo = cfo;
        ch.tail = c.N();
        const phy::SyncResult s = phy::schmidl_cox_sync(phy::apply_channel(f.samples, ch, c.N(), rng), c);
        timing_wrong += s.frame_start != delay;
        cfo_err = std::max(cfo_err, std::abs(s.cfo - cfo));
        ++cases;
      }
    }
  }
  o.require(timing_wrong == 0, "noiseless timing exact in " + std::to_string(cases - timing_wrong) + "/" + std::to_string(cases));
  o.require(cfo_err <= 0.01, "noiseless CFO error " + fmt("%.2e", cfo_err));

  const phy::GfdmConfig c;
  int good = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    const phy::Frame f = phy::build_frame(phy::gfdm_modulate(random_grid(c, rng), c), c);
    phy::ChannelModel ch = phy::ChannelModel::awgn(10.0);
    ch.delay = static_cast<int>(rng.uniform_int(200));
    ch.cfo = rng.uniform(-0.45, 0.45);
    ch.tail = c.N();
    try {
      const phy::SyncResult s = phy::schmidl_cox_sync(phy::apply_channel(f.samples, ch, c.N(), rng), c);
      good += std::abs(s.frame_start - ch.delay) <= 2;
    } catch (const phy::NoFrameDetected&) {
    }
  }
  o.require(good >= 990, "10 dB timing within 2 samples in " + std::to_string(good) + "/1000");
  return o;
}

// ---------------------------------------------------------------------------

Outcome localization() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const cli::Json cfg = cli::defaults(cli::Section::Loc);
  loc::ServerConfig sc = cli::loc_server(cfg);
  sc.noise.sigma_d = 1.0;
  const auto anchors = cli::anchors_from(cfg.at("anchors"), "");
  Simulator sim;
  loc::LocalizationServer server(sim, sc, derive_seed(1, 2));
  for (const auto& a : anchors) server.register_anchor(a);
  Rng place(derive_seed(1, 1));
  double sq = 0.0;
  int fixes = 0, failed = 0;
  for (int t = 0; t < 1000; ++t) {
    const loc::Vec3 truth(place.uniform(0.0, 10.0), place.uniform(0.0, 10.0), place.uniform(0.0, 3.0));
    try {
      sq += (server.locate(1, truth).estimate.position - truth).squaredNorm();
      ++fixes;
    } catch (const loc::InsufficientRanging&) {
      ++failed;
    }
  }
  const double rmse = std::sqrt(sq / fixes);
  o.require(rmse >= 0.8 && rmse <= 1.6, "sigma_d 1 m, " + std::to_string(anchors.size()) + " anchors: 3-D RMSE " +
                                            fmt("%.3f", rmse) + " m over " + std::to_string(fixes) + " fixes (" +
                                            std::to_string(failed) + " rounds lost)");

  Rng rng(3);
  int tested = 0, exact = 0;
  while (tested < 200) {
    std::vector<loc::RangeMeasurement> ms;
    const loc::Vec3 p(rng.uniform(0, 10), rng.uniform(0, 10), rng.uniform(0, 3));
    const int n = 4 + static_cast<int>(rng.uniform_int(4));
    for (int i = 0; i < n; ++i) {
      const loc::Vec3 a(rng.uniform(0, 10), rng.uniform(0, 10), rng.uniform(0, 3));
      ms.push_back({loc::Anchor{i, a}, (p - a).norm()});
    }
    if (loc::geometry_condition(ms) > 50.0) continue;
    ++tested;
    exact += (loc::trilaterate(ms).position - p).norm() <= 1e-6;
  }
  o.require(exact == tested, "sigma_d 0: " + std::to_string(exact) + "/200 within 1e-6 m");
  const double t = seconds_since(t0);
  o.require(t <= 30.0, fmt("%.2f", t) + " s");
  return o;
}

// ---------------------------------------------------------------------------

Outcome nlos_study() {
  Outcome o;
  std::array<double, 4> mean{};
  const int seeds = 10;
  for (int s = 1; s <= seeds; ++s) {
    nlos::SyntheticCirParams p;
    p.seed = static_cast<std::uint64_t>(s);
    const auto acc = nlos::evaluate_subsets(nlos::generate_dataset(p), {nlos::kAllSubsets.begin(), nlos::kAllSubsets.end()},
                                            nlos::EvalOptions{}, static_cast<std::uint64_t>(s), workers());
    for (std::size_t i = 0; i < 4; ++i) mean[i] += acc[i].overall / seeds;
  }
  const double tol = 0.02;
  o.require(mean[3] >= mean[2] - tol && mean[2] >= std::max(mean[1], mean[0]) - tol,
            "mean accuracy S1 " + fmt("%.4f", mean[0]) + " S2 " + fmt("%.4f", mean[1]) + " S3 " + fmt("%.4f", mean[2]) +
                " S4 " + fmt("%.4f", mean[3]));

  Rng rng(4);
  double err = 0.0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<std::complex<double>> taps(8 + rng.uniform_int(56));
    for (auto& x : taps) x = {rng.normal(), rng.normal()};
    long double m = 0;
    for (const auto& x : taps) m += std::abs(x);
    m /= taps.size();
    long double c2 = 0, c3 = 0, c4 = 0;
    for (const auto& x : taps) {
      const long double d = std::abs(x) - m;
      c2 += d * d;
      c3 += d * d * d;
      c4 += d * d * d * d;
    }
    c2 /= taps.size();
    c3 /= taps.size();
    c4 /= taps.size();
    const long double sd = std::sqrt(c2);
    const nlos::FeatureVector f = nlos::extract_features(taps);
    err = std::max({err, std::abs(f.mu - static_cast<double>(m)), std::abs(f.sigma - static_cast<double>(sd)),
                    std::abs(f.s - static_cast<double>(c3 / (sd * sd * sd))),
                    std::abs(f.kappa - static_cast<double>(c4 / (c2 * c2)))});
  }
  o.require(err <= 1e-12, "moment extractor vs direct definition " + fmt("%.2e", err));
  return o;
}

// ---------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / ("iwsim_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  const std::vector<std::vector<std::string>> runs = {
      {"mac-sim", "--access", "hcca", "--out", "hcca.csv"},
      {"repro", "fig-delay", "--n-ar", "5..20:5"},
      {"repro", "fig-scheduler"},
      {"phy", "ber", "--snr-db", "0..10:5", "--bits", "100000", "--out", "ber.csv"},
      {"loc", "sim", "--out", "fixes.csv"},
      {"nlos", "gen", "--out", "cirs.bin"},
      {"nlos", "eval", "--data", "cirs.bin", "--out", "acc.csv"},
  };
  int bad_exit = 0;
  for (const char* pass : {"a", "b"}) {
    const fs::path dir = root / pass;
    fs::create_directories(dir);
    const std::string threads = std::string(pass) == "a" ? "1" : "4";
    for (const auto& r : runs) {
      std::vector<std::string> args{"iwsim", "--seed", "1", "--threads", threads, "--out-dir", dir.string()};
      args.insert(args.end(), r.begin(), r.end());
      if (args[args.size() - 4] == "--data") args[args.size() - 3] = (dir / "cirs.bin").string();
      std::ostringstream out, err;
      bad_exit += cli::dispatch(args, out, err) != cli::kExitOk;
    }
  }
  int files = 0, differ = 0;
  for (const auto& e : fs::directory_iterator(root / "a")) {
    const std::string ext = e.path().extension().string();
    if (ext != ".csv" && ext != ".bin") continue;
    ++files;
    differ += slurp(e.path()) != slurp(root / "b" / e.path().filename());
  }
  fs::remove_all(root);
  o.require(bad_exit == 0, "all runs exit 0");
  o.require(files >= 10 && differ == 0,
            std::to_string(files - differ) + "/" + std::to_string(files) + " outputs byte-identical across repeats");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"HCCA safety guarantee", hcca_safety},
      {"access-method ordering", access_ordering},
      {"HCCA AR capacity crossover", hcca_capacity},
      {"PCF crossover", pcf_crossover},
      {"EDF vs reference scheduler", edf_vs_reference},
      {"DCF single-station oracle", dcf_oracle},
      {"GFDM correctness", gfdm_correctness},
      {"Schmidl-Cox synchronization", schmidl_cox},
      {"localization accuracy", localization},
      {"NLOS feature study", nlos_study},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::printf("criterion %2zu %s  %s: %s (%.1f s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first,
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
