#include "iwsim/cli/commands.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "iwsim/cli/manifest.hpp"
#include "iwsim/core/simulator.hpp"
#include "iwsim/loc/server.hpp"
#include "iwsim/mac/sweep.hpp"
#include "iwsim/nlos/dataset.hpp"
#include "iwsim/nlos/evaluate.hpp"
#include "iwsim/phy/ber.hpp"
#include "iwsim/phy/frame.hpp"

namespace iwsim::cli {

namespace fs = std::filesystem;

namespace {

unsigned worker_count(const RunContext& ctx) {
  if (ctx.threads > 0) return ctx.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string resolve_out(const RunContext& ctx, const std::string& name) {
  fs::path p(name);
  if (p.is_relative()) p = fs::path(ctx.out_dir) / p;
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  return p.string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw std::runtime_error("cannot write " + path);
}

void write_manifests(Section section, const Json& cfg, const RunContext& ctx,
                     const std::vector<std::string>& outputs) {
  RunManifest m;
  m.subcommand = to_string(section);
  m.config = cfg;
  m.seed = seed_of(cfg);
  m.out_dir = ctx.out_dir;
  m.outputs = outputs;
  for (const std::string& o : outputs) write_manifest(m, manifest_path_for(o));
}

void say(const RunContext& ctx, const std::string& line) {
  if (ctx.log) *ctx.log << line << '\n';
}

std::string text_of(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw ConfigError("expected a range string such as \"5..50:5\", got " + v.dump());
}

std::vector<std::string> run_mac(const Json& cfg, const RunContext& ctx) {
  const mac::Scenario s = mac_scenario(cfg);
  const mac::PhyParams phy = mac_phy(cfg);
  const mac::IntRange range = mac::IntRange::parse(text_of(cfg.at("n_ar")));
  const auto points = mac::sweep(s, phy, range, worker_count(ctx));
  std::ostringstream csv;
  mac::write_sweep_csv(csv, points);
  const std::string path = resolve_out(ctx, cfg.at("out").get<std::string>());
  write_text(path, csv.str());
  say(ctx, "wrote " + path);
  return {path};
}

std::vector<std::string> run_repro(Section section, const Json& cfg, const RunContext& ctx) {
  struct Variant {
    const char* name;
    mac::Access access;
    mac::SchedulerKind scheduler;
  };
  const std::vector<Variant> variants =
      section == Section::ReproDelay
          ? std::vector<Variant>{{"dcf", mac::Access::DCF, mac::SchedulerKind::Reference},
                                 {"pcf", mac::Access::PCF, mac::SchedulerKind::Reference},
                                 {"hcca", mac::Access::HCCA, mac::SchedulerKind::Reference}}
          : std::vector<Variant>{{"ref", mac::Access::HCCA, mac::SchedulerKind::Reference},
                                 {"edf", mac::Access::HCCA, mac::SchedulerKind::EDF}};
  const mac::PhyParams phy = mac_phy(cfg);
  const mac::IntRange range = mac::IntRange::parse(text_of(cfg.at("n_ar")));
  const std::string prefix = cfg.at("out_prefix").get<std::string>();
  std::vector<std::string> paths;
  for (const Variant& v : variants) {
    mac::Scenario s = mac_scenario(cfg);
    s.access = v.access;
    s.scheduler = v.scheduler;
    const auto points = mac::sweep(s, phy, range, worker_count(ctx));
    std::ostringstream csv;
    mac::write_sweep_csv(csv, points);
    paths.push_back(resolve_out(ctx, prefix + "_" + v.name + ".csv"));
    write_text(paths.back(), csv.str());
    say(ctx, "wrote " + paths.back());
  }
  return paths;
}

std::vector<std::string> run_phy(const Json& cfg, const RunContext& ctx) {
  const phy::GfdmConfig g = gfdm_config(cfg);
  const phy::ChannelModel base = phy_channel(cfg);
  const phy::BerOptions options = ber_options(cfg);
  const std::uint64_t seed = seed_of(cfg);
  const std::string reference = cfg.at("snr_reference").get<std::string>();
  if (reference != "sample" && reference != "ebn0") {
    throw ConfigError("key 'snr_reference': expected \"sample\" or \"ebn0\"");
  }
  const Json& bits_v = cfg.at("bits");
  if (!bits_v.is_number() || !(bits_v.get<double>() >= 1.0)) throw ConfigError("key 'bits': expected a positive number");
  const auto bits = static_cast<std::uint64_t>(std::llround(bits_v.get<double>()));
  const std::vector<double> snrs = parse_real_range(text_of(cfg.at("snr_db")));

  std::vector<phy::BerResult> results(snrs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < snrs.size(); i = next++) {
      try {
        phy::ChannelModel ch = base;
        if (ch.kind == phy::ChannelKind::Ideal) ch.kind = phy::ChannelKind::AWGN;
        ch.snr_db = reference == "ebn0" ? phy::snr_db_from_ebn0(snrs[i], g.constellation) : snrs[i];
        results[i] = phy::ber_run(g, ch, bits, derive_seed(seed, i), options);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(worker_count(ctx), static_cast<unsigned>(snrs.size())));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::ostringstream csv;
  csv << "snr_db,ber,bits\n";
  char buf[128];
  for (std::size_t i = 0; i < snrs.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6g,%.9g,%llu\n", snrs[i], results[i].ber,
                  static_cast<unsigned long long>(results[i].bits));
    csv << buf;
  }
  std::vector<std::string> paths{resolve_out(ctx, cfg.at("out").get<std::string>())};
  write_text(paths.back(), csv.str());
  say(ctx, "wrote " + paths.back());

  const std::string iq = cfg.at("iq_out").get<std::string>();
  if (!iq.empty()) {
    Rng rng(derive_seed(seed, 0x4951));
    const int n_bits = static_cast<int>(g.active_set().size()) * g.M * phy::bits_per_symbol(g.constellation);
    std::vector<std::uint8_t> payload_bits(static_cast<std::size_t>(n_bits));
    for (auto& b : payload_bits) b = static_cast<std::uint8_t>(rng.next_u64() & 1U);
    const phy::CVector block =
        phy::gfdm_modulate(phy::map_resources(phy::map_bits(payload_bits, g.constellation), g), g);
    paths.push_back(resolve_out(ctx, iq));
    phy::write_iq(paths.back(), phy::build_frame(block, g).samples);
    say(ctx, "wrote " + paths.back());
  }
  return paths;
}

std::vector<std::string> run_loc(const Json& cfg, const RunContext& ctx) {
  const loc::ServerConfig server_cfg = loc_server(cfg);
  const std::uint64_t seed = seed_of(cfg);
  const std::vector<loc::Anchor> anchors = anchors_from(cfg.at("anchors"), "");
  const std::string path_file = cfg.at("path").get<std::string>();
  const std::vector<loc::Vec3> path = path_file.empty() ? std::vector<loc::Vec3>{} : path_from_file(path_file);
  const Json& room = cfg.at("room");
  if (!room.is_array() || room.size() != 3 || !room[0].is_number() || !room[1].is_number() ||
      !room[2].is_number()) {
    throw ConfigError("key 'room': expected [x, y, z] in meters");
  }
  const loc::Vec3 box(room[0].get<double>(), room[1].get<double>(), room[2].get<double>());
  const Json& trials_v = cfg.at("trials");
  if (!trials_v.is_number_integer() || trials_v.get<long long>() < 1) {
    throw ConfigError("key 'trials': expected a positive integer");
  }
  const auto trials = trials_v.get<long long>();

  Simulator sim;
  loc::LocalizationServer server(sim, server_cfg, derive_seed(seed, 2));
  for (const loc::Anchor& a : anchors) server.register_anchor(a);
  Rng place(derive_seed(seed, 1));

  std::ostringstream csv;
  csv << "trial,true_x,true_y,true_z,est_x,est_y,est_z,err_m,residual_rms,iterations\n";
  char buf[320];
  double sq = 0.0;
  long long fixed = 0;
  for (long long t = 0; t < trials; ++t) {
    loc::Vec3 truth;
    if (!path.empty()) {
      truth = path[static_cast<std::size_t>(t) % path.size()];
    } else {
      for (int k = 0; k < 3; ++k) truth[k] = place.uniform(0.0, box[k]);
    }
    try {
      const loc::Fix& fix = server.locate(1, truth);
      const loc::Vec3& e = fix.estimate.position;
      const double err = (e - truth).norm();
      sq += err * err;
      ++fixed;
      std::snprintf(buf, sizeof buf, "%lld,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%d\n", t, truth.x(),
                    truth.y(), truth.z(), e.x(), e.y(), e.z(), err, fix.estimate.residual_rms,
                    fix.estimate.iterations);
    } catch (const loc::InsufficientRanging&) {
      // Round lost to discarded exchanges; the row keeps its place.
      std::snprintf(buf, sizeof buf, "%lld,%.6f,%.6f,%.6f,nan,nan,nan,nan,nan,0\n", t, truth.x(), truth.y(),
                    truth.z());
    }
    csv << buf;
  }
  const std::string out = resolve_out(ctx, cfg.at("out").get<std::string>());
  write_text(out, csv.str());
  char line[160];
  std::snprintf(line, sizeof line, "3-D RMSE %.4f m over %lld fixes, %lld rounds failed",
                fixed > 0 ? std::sqrt(sq / static_cast<double>(fixed)) : 0.0, fixed, trials - fixed);
  say(ctx, line);
  say(ctx, "wrote " + out);
  return {out};
}

std::vector<std::string> run_nlos_gen(const Json& cfg, const RunContext& ctx) {
  const auto cirs = nlos::generate_dataset(nlos_params(cfg));
  const std::string out = resolve_out(ctx, cfg.at("out").get<std::string>());
  nlos::write_cirs_file(out, cirs);
  say(ctx, "wrote " + std::to_string(cirs.size()) + " CIRs to " + out);
  return {out};
}

std::vector<std::string> run_nlos_eval(const Json& cfg, const RunContext& ctx) {
  const nlos::EvalOptions options = nlos_eval_options(cfg);
  const auto subsets = nlos::parse_subsets(cfg.at("subsets").get<std::string>());
  const auto cirs = nlos::read_cirs_file(cfg.at("data").get<std::string>());
  const auto rows = nlos::evaluate_subsets(cirs, subsets, options, seed_of(cfg), worker_count(ctx));
  std::ostringstream csv;
  nlos::write_accuracy_csv(csv, rows);
  const std::string out = resolve_out(ctx, cfg.at("out").get<std::string>());
  write_text(out, csv.str());
  say(ctx, "wrote " + out);
  return {out};
}

/// Flag bound to a config key; applied only when given on the command line.
struct Binding {
  enum class Kind { Real, Int, Text };
  std::string key;
  Kind kind;
  std::string value;
  CLI::Option* option = nullptr;
};

class Bindings {
 public:
  void add(CLI::App* app, const std::string& flag, const std::string& key, Binding::Kind kind,
           const std::string& help) {
    items_.push_back(std::make_unique<Binding>(Binding{key, kind, {}, nullptr}));
    Binding& b = *items_.back();
    b.option = app->add_option(flag, b.value, help);
    if (kind == Binding::Kind::Real) b.option->check(CLI::Number);
    if (kind == Binding::Kind::Int) b.option->check(CLI::NonNegativeNumber);
  }

  void apply(Json& overrides) const {
    for (const auto& b : items_) {
      if (b->option->count() == 0) continue;
      switch (b->kind) {
        case Binding::Kind::Real: overrides[b->key] = std::stod(b->value); break;
        case Binding::Kind::Int: {
          const double d = std::stod(b->value);
          if (std::floor(d) != d) throw CLI::ValidationError(b->option->get_name(), "expected an integer");
          overrides[b->key] = static_cast<long long>(d);
          break;
        }
        case Binding::Kind::Text: overrides[b->key] = b->value; break;
      }
    }
  }

 private:
  std::vector<std::unique_ptr<Binding>> items_;
};

}  // namespace

Section parse_section(const std::string& subcommand) {
  for (Section s : {Section::Mac, Section::Phy, Section::Loc, Section::NlosGen, Section::NlosEval,
                    Section::ReproDelay, Section::ReproScheduler}) {
    if (to_string(s) == subcommand) return s;
  }
  throw ConfigError("unknown subcommand '" + subcommand + "' in manifest");
}

std::vector<std::string> run_section(Section section, const Json& cfg, const RunContext& ctx) {
  std::vector<std::string> outputs;
  switch (section) {
    case Section::Mac: outputs = run_mac(cfg, ctx); break;
    case Section::ReproDelay:
    case Section::ReproScheduler: outputs = run_repro(section, cfg, ctx); break;
    case Section::Phy: outputs = run_phy(cfg, ctx); break;
    case Section::Loc: outputs = run_loc(cfg, ctx); break;
    case Section::NlosGen: outputs = run_nlos_gen(cfg, ctx); break;
    case Section::NlosEval: outputs = run_nlos_eval(cfg, ctx); break;
  }
  write_manifests(section, cfg, ctx, outputs);
  return outputs;
}

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"iwsim: industrial wireless simulation toolkit", "iwsim"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kToolkitVersion);

  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  unsigned threads = 0;
  std::string config_path;
  app.add_option("--seed", seed, "Master seed (overrides the config)");
  app.add_option("--out-dir", out_dir, "Directory for outputs and manifests")->capture_default_str();
  app.add_option("--threads", threads, "Worker threads, 0 = all cores")->capture_default_str();
  app.add_option("--config", config_path, "Config file (.toml or .json)");

  std::vector<std::pair<CLI::App*, Section>> leaves;
  Bindings bind;
  using K = Binding::Kind;

  CLI::App* mac_cmd = app.add_subcommand("mac-sim", "802.11 access-method latency sweep");
  bind.add(mac_cmd, "--access", "access", K::Text, "dcf | pcf | hcca");
  bind.add(mac_cmd, "--scheduler", "scheduler", K::Text, "ref | edf (HCCA only)");
  bind.add(mac_cmd, "--n-ar", "n_ar", K::Text, "AR station counts, A..B[:step]");
  bind.add(mac_cmd, "--safety-msi", "safety_msi_ms", K::Real, "Safety MSI in ms");
  bind.add(mac_cmd, "--duration", "duration_s", K::Real, "Simulated seconds per point");
  bind.add(mac_cmd, "--out", "out", K::Text, "CSV output");
  leaves.emplace_back(mac_cmd, Section::Mac);

  CLI::App* phy_cmd = app.add_subcommand("phy", "GFDM physical layer");
  phy_cmd->require_subcommand(1);
  CLI::App* ber_cmd = phy_cmd->add_subcommand("ber", "Monte-Carlo BER over an SNR range");
  bind.add(ber_cmd, "--snr-db", "snr_db", K::Text, "SNR points, A..B[:step]");
  bind.add(ber_cmd, "--bits", "bits", K::Int, "Bits per SNR point");
  bind.add(ber_cmd, "--out", "out", K::Text, "CSV output");
  leaves.emplace_back(ber_cmd, Section::Phy);

  CLI::App* loc_cmd = app.add_subcommand("loc", "Two-way ranging localization");
  loc_cmd->require_subcommand(1);
  CLI::App* sim_cmd = loc_cmd->add_subcommand("sim", "Simulated localization rounds");
  bind.add(sim_cmd, "--anchors", "anchors", K::Text, "anchors.json: [{id, x, y, z}]");
  bind.add(sim_cmd, "--path", "path", K::Text, "path.json: [{x, y, z}] visited cyclically");
  bind.add(sim_cmd, "--sigma-d", "sigma_d", K::Real, "Ranging noise std in m");
  bind.add(sim_cmd, "--trials", "trials", K::Int, "Number of fixes");
  bind.add(sim_cmd, "--out", "out", K::Text, "CSV output");
  leaves.emplace_back(sim_cmd, Section::Loc);

  CLI::App* nlos_cmd = app.add_subcommand("nlos", "LOS/NLOS identification");
  nlos_cmd->require_subcommand(1);
  CLI::App* gen_cmd = nlos_cmd->add_subcommand("gen", "Generate a synthetic CIR set");
  std::string params_path;
  gen_cmd->add_option("--params", params_path, "Generator parameters (.toml or .json)");
  bind.add(gen_cmd, "--out", "out", K::Text, "Binary CIR output");
  leaves.emplace_back(gen_cmd, Section::NlosGen);
  CLI::App* eval_cmd = nlos_cmd->add_subcommand("eval", "Feature-subset accuracy study");
  bind.add(eval_cmd, "--data", "data", K::Text, "Binary CIR input");
  bind.add(eval_cmd, "--subsets", "subsets", K::Text, "Comma list of s1..s4");
  bind.add(eval_cmd, "--out", "out", K::Text, "CSV output");
  leaves.emplace_back(eval_cmd, Section::NlosEval);

  CLI::App* repro_cmd = app.add_subcommand("repro", "Figure sweeps");
  repro_cmd->require_subcommand(1);
  CLI::App* delay_cmd = repro_cmd->add_subcommand("fig-delay", "DCF, PCF and HCCA over n_ar");
  bind.add(delay_cmd, "--n-ar", "n_ar", K::Text, "AR station counts, A..B[:step]");
  bind.add(delay_cmd, "--duration", "duration_s", K::Real, "Simulated seconds per point");
  leaves.emplace_back(delay_cmd, Section::ReproDelay);
  CLI::App* sched_cmd = repro_cmd->add_subcommand("fig-scheduler", "HCCA reference vs EDF");
  bind.add(sched_cmd, "--n-ar", "n_ar", K::Text, "AR station counts, A..B[:step]");
  bind.add(sched_cmd, "--duration", "duration_s", K::Real, "Simulated seconds per point");
  leaves.emplace_back(sched_cmd, Section::ReproScheduler);

  CLI::App* rerun_cmd = app.add_subcommand("rerun", "Repeat a run from its manifest");
  std::string manifest_path;
  rerun_cmd->add_option("manifest", manifest_path, "Manifest JSON written beside an output")->required();

  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();
  for (auto& [leaf, section] : leaves) leaf->fallthrough();

  if (argc <= 1) {
    err << app.help();
    return kExitUsage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  RunContext ctx;
  ctx.out_dir = out_dir;
  ctx.threads = threads;
  ctx.log = &out;
  try {
    if (rerun_cmd->parsed()) {
      const RunManifest m = read_manifest(manifest_path);
      if (m.version != kToolkitVersion) {
        err << "warning: manifest written by version " << m.version << ", running " << kToolkitVersion << '\n';
      }
      if (app.get_option("--out-dir")->count() == 0) ctx.out_dir = m.out_dir;
      const Section section = parse_section(m.subcommand);
      run_section(section, resolve(section, m.config, manifest_path), ctx);
      return kExitOk;
    }
    for (auto& [leaf, section] : leaves) {
      if (!leaf->parsed()) continue;
      const std::string path = !params_path.empty() && section == Section::NlosGen ? params_path : config_path;
      Json overrides = path.empty() ? Json::object() : read_config_file(path);
      bind.apply(overrides);
      if (seed) overrides["seed"] = *seed;
      const Json cfg = resolve(section, overrides, path.empty() ? "command line" : path);
      run_section(section, cfg, ctx);
      return kExitOk;
    }
    err << app.help();
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CLI::Error& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomainError;
  }
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const std::string& a : args) argv.push_back(a.c_str());
  return dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace iwsim::cli
