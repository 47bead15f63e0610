// holoflow command line: solve single instances, compare the five solvers,
// certify the amplitude/phase guarantees, and emit synthetic targets.

#include <CLI11.hpp>
#include <json.hpp>

#include <holoflow/holoflow.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <thread>

namespace hf = holoflow;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 1;
constexpr int exit_numeric = 2;
constexpr int exit_verify = 3;

// Fixed offset separating the synthetic-target witness stream from the
// solver's initialization stream when both derive from one --seed.
constexpr std::uint64_t target_seed_offset = 0x7461726765740ULL;

hf::GridShape parse_shape(const std::string& text) {
    const auto x = text.find('x');
    try {
        if (x == std::string::npos) return hf::GridShape::line(std::stoull(text));
        return hf::GridShape::plane(std::stoull(text.substr(0, x)), std::stoull(text.substr(x + 1)));
    } catch (const std::exception&) {
        throw hf::config_error("cannot parse shape '" + text + "' (expected N or RxC)");
    }
}

struct TargetSpec {
    std::string name;         // label used in file names and the manifest
    std::string origin;       // image path, scene spec, or synth shape
    hf::IntensityGrid grid;
};

TargetSpec make_image_target(const std::string& path) {
    return {fs::path(path).stem().string(), path, hf::load_image(path)};
}

TargetSpec make_scene_target(const std::string& spec) {
    const auto at = spec.find('@');
    if (at == std::string::npos)
        throw hf::config_error("scene spec must look like name@shape, e.g. blobs@128x128");
    const std::string name = spec.substr(0, at);
    const hf::GridShape shape = parse_shape(spec.substr(at + 1));
    return {name + "_" + shape.str(), "scene:" + spec,
            hf::normalize_target(hf::make_scene(name, shape))};
}

TargetSpec make_synth_target(const std::string& shape_text, std::uint64_t seed) {
    const hf::GridShape shape = parse_shape(shape_text);
    auto [witness, target] = hf::synthesize_feasible_target(shape, seed);
    return {"synth_" + shape.str(), "synth:" + shape.str() + ":seed" + std::to_string(seed),
            std::move(target)};
}

json config_json(const hf::SolverConfig& cfg) {
    json j;
    j["algorithm"] = hf::algorithm_name(cfg.algorithm);
    j["learning_rate"] = cfg.learning_rate;
    j["iterations"] = cfg.iterations;
    j["seed"] = cfg.seed;
    j["init_variance"] = cfg.init_variance;
    j["normalize_loss"] = cfg.normalize_loss;
    j["log_stride"] = cfg.log_stride;
    j["adam"] = {{"beta1", cfg.adam.beta1}, {"beta2", cfg.adam.beta2}, {"epsilon", cfg.adam.epsilon}};
    if (cfg.snapshot_indices) j["snapshot_indices"] = *cfg.snapshot_indices;
    return j;
}

void write_manifest(const fs::path& dir, json manifest) {
    manifest["software"] = {{"name", "holoflow"}, {"version", hf::version}};
    std::ofstream out(dir / "manifest.json");
    if (!out) throw hf::io_error("cannot write manifest in '" + dir.string() + "'");
    out << manifest.dump(2) << "\n";
}

json report_json(const hf::TheoremReport& r) {
    return json{{"name", r.name},
                {"samples_checked", r.samples_checked},
                {"max_violation", r.max_violation},
                {"tolerance", r.tolerance},
                {"pass", r.pass},
                {"worst_case", r.worst_case}};
}

std::size_t thread_budget(std::size_t jobs) {
    std::size_t cap = 0;  // 0 = auto
    if (const char* env = std::getenv("HOLOFLOW_THREADS")) {
        try {
            cap = std::stoull(env);
        } catch (const std::exception&) {
            throw hf::config_error("HOLOFLOW_THREADS must be an integer");
        }
    }
    std::size_t hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const std::size_t budget = cap == 0 ? hw : cap;
    return std::max<std::size_t>(1, std::min(budget, jobs));
}

// ---------------------------------------------------------------------------
// solve

struct SolveArgs {
    std::string algo = "wfcf";
    std::string image, scene, synth;
    double lr = 1e-2;
    std::size_t iters = 1000;
    std::uint64_t seed = 0;
    std::uint64_t target_seed = 0;
    bool target_seed_set = false;
    double init_variance = 0.01;
    std::string loss_mode = "normalized";
    std::size_t log_stride = 1;
    std::vector<std::size_t> track;
    std::string out;
};

int cmd_solve(const SolveArgs& args) {
    const int sources = (!args.image.empty()) + (!args.scene.empty()) + (!args.synth.empty());
    if (sources != 1)
        throw hf::config_error("choose exactly one target source: --image, --scene, or --synth");
    if (args.loss_mode != "raw" && args.loss_mode != "normalized")
        throw hf::config_error("--loss-mode must be raw or normalized");

    hf::SolverConfig cfg;
    cfg.algorithm = hf::algorithm_from_name(args.algo);
    cfg.learning_rate = args.lr;
    cfg.iterations = args.iters;
    cfg.seed = args.seed;
    cfg.init_variance = args.init_variance;
    cfg.normalize_loss = args.loss_mode == "normalized";
    cfg.log_stride = args.log_stride;
    if (!args.track.empty()) cfg.snapshot_indices = args.track;
    cfg.validate();

    const std::uint64_t tseed =
        args.target_seed_set ? args.target_seed : args.seed + target_seed_offset;
    TargetSpec target = !args.image.empty() ? make_image_target(args.image)
                        : !args.scene.empty() ? make_scene_target(args.scene)
                                              : make_synth_target(args.synth, tseed);

    const fs::path dir(args.out);
    fs::create_directories(dir);

    hf::detail::RunClock clock;
    hf::SolveResult result = hf::solve(target.grid, cfg);
    const double total_ms = clock.elapsed_ms();

    hf::save_hologram(hf::init_phase_from(result.final_hologram), dir / "hologram.bin");
    hf::save_intensity(result.displayed, dir / "displayed.pgm", hf::ImageFormat::pgm);
    hf::write_curve_csv(result.log, dir / "curve.csv");

    json manifest;
    manifest["command"] = "solve";
    manifest["config"] = config_json(cfg);
    manifest["input"] = target.origin;
    if (!args.synth.empty()) manifest["target_seed"] = tseed;
    manifest["outputs"] = {"hologram.bin", "displayed.pgm", "curve.csv"};
    manifest["timing"] = {{"total_ms", total_ms},
                          {"per_iteration_ms", total_ms / static_cast<double>(cfg.iterations)}};
    write_manifest(dir, manifest);

    const double final_psnr = hf::psnr(result.displayed, target.grid);
    std::printf("%s on %s: %zu iterations, loss %.6g -> %.6g, final psnr %.2f dB\n",
                hf::algorithm_name(cfg.algorithm), target.name.c_str(), cfg.iterations,
                result.log.front().loss, result.log.back().loss, final_psnr);
    return exit_ok;
}

// ---------------------------------------------------------------------------
// compare

struct CompareArgs {
    std::vector<std::string> images, scenes, synths;
    double lr = 1e-2;
    double adam_lr = 1e-2;
    std::size_t iters = 1000;
    std::uint64_t seed = 0;
    std::string loss_mode = "normalized";
    std::size_t log_stride = 1;
    std::string out;
};

int cmd_compare(const CompareArgs& args) {
    if (args.loss_mode != "raw" && args.loss_mode != "normalized")
        throw hf::config_error("--loss-mode must be raw or normalized");

    std::vector<TargetSpec> targets;
    for (const auto& p : args.images) targets.push_back(make_image_target(p));
    for (const auto& s : args.scenes) targets.push_back(make_scene_target(s));
    for (const auto& s : args.synths)
        targets.push_back(make_synth_target(s, args.seed + target_seed_offset));
    if (targets.empty())
        throw hf::config_error("no targets: give at least one --image, --scene, or --synth");

    const std::vector<hf::Algorithm> methods = {hf::Algorithm::gs, hf::Algorithm::kaczmarz,
                                                hf::Algorithm::wfpf, hf::Algorithm::wfpf_adam,
                                                hf::Algorithm::wfcf};

    struct Job {
        std::size_t target_index;
        hf::Algorithm method;
        bool skipped = false;
        double psnr_db = 0.0;
    };
    std::vector<Job> jobs;
    for (std::size_t t = 0; t < targets.size(); ++t)
        for (hf::Algorithm m : methods) jobs.push_back({t, m});

    const fs::path dir(args.out);
    fs::create_directories(dir);

    auto run_job = [&](Job& job) {
        const TargetSpec& target = targets[job.target_index];
        if (job.method == hf::Algorithm::kaczmarz &&
            target.grid.size() > hf::kaczmarz_size_cap) {
            job.skipped = true;
            return;
        }
        hf::SolverConfig cfg;
        cfg.algorithm = job.method;
        cfg.learning_rate = job.method == hf::Algorithm::wfpf_adam ? args.adam_lr : args.lr;
        cfg.iterations = args.iters;
        cfg.seed = args.seed;
        cfg.normalize_loss = args.loss_mode == "normalized";
        cfg.log_stride = args.log_stride;
        const hf::SolveResult result = hf::solve(target.grid, cfg);
        job.psnr_db = hf::psnr(result.displayed, target.grid);
        hf::write_curve_csv(
            result.log, dir / (target.name + "_" + hf::algorithm_name(job.method) + ".csv"));
    };

    hf::detail::RunClock clock;
    const std::size_t workers = thread_budget(jobs.size());
    if (workers <= 1) {
        for (Job& job : jobs) run_job(job);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = next++; i < jobs.size(); i = next++) run_job(jobs[i]);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        for (auto& th : pool) th.join();
        for (auto& err : errors)
            if (err) std::rethrow_exception(err);
    }
    const double total_ms = clock.elapsed_ms();

    std::FILE* summary = std::fopen((dir / "summary.csv").string().c_str(), "wb");
    if (!summary) throw hf::io_error("cannot write summary.csv");
    std::fputs("target,method,psnr_db\n", summary);
    for (const Job& job : jobs) {
        if (job.skipped) {
            std::fprintf(stderr, "note: kaczmarz skipped for %s (size over %zu cap)\n",
                         targets[job.target_index].name.c_str(), hf::kaczmarz_size_cap);
            continue;
        }
        std::fprintf(summary, "%s,%s,%.17g\n", targets[job.target_index].name.c_str(),
                     hf::algorithm_name(job.method), job.psnr_db);
    }
    std::fclose(summary);

    json manifest;
    manifest["command"] = "compare";
    manifest["seed"] = args.seed;
    manifest["iterations"] = args.iters;
    manifest["learning_rate"] = args.lr;
    manifest["adam_learning_rate"] = args.adam_lr;
    manifest["normalize_loss"] = args.loss_mode == "normalized";
    json jt = json::array();
    for (const auto& t : targets) jt.push_back(t.origin);
    manifest["targets"] = jt;
    manifest["timing"] = {{"total_ms", total_ms}};
    write_manifest(dir, manifest);

    std::printf("compare: %zu targets x %zu methods -> %s\n", targets.size(), methods.size(),
                (dir / "summary.csv").string().c_str());
    return exit_ok;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
    std::string shape = "64";
    std::uint64_t seed = 0;
    std::size_t iters = 500;
    double lr = 1e-2;
    std::vector<std::string> checkers;
    std::size_t wk_n = 256;
    std::string fault;
    std::string out;
};

int cmd_verify(const VerifyArgs& args) {
    std::vector<std::string> selected = args.checkers;
    if (selected.empty()) selected = {"theorem1", "theorem2", "corollary1", "wiener-khinchin"};
    for (const auto& c : selected)
        if (c != "theorem1" && c != "theorem2" && c != "corollary1" && c != "wiener-khinchin")
            throw hf::config_error("unknown checker '" + c + "'");
    if (!args.fault.empty() && args.fault != "parallel-grad")
        throw hf::config_error("unknown fault mode '" + args.fault + "'");

    auto wants = [&](const char* name) {
        return std::find(selected.begin(), selected.end(), name) != selected.end();
    };

    std::vector<hf::TheoremReport> reports;

    if (wants("theorem1") || wants("theorem2") || wants("corollary1")) {
        const hf::GridShape shape = parse_shape(args.shape);
        auto [witness, target] =
            hf::synthesize_feasible_target(shape, args.seed + target_seed_offset);
        hf::SolverConfig cfg;
        cfg.algorithm = hf::Algorithm::wfcf;
        cfg.learning_rate = args.lr;
        cfg.iterations = args.iters;
        cfg.seed = args.seed;
        cfg.log_stride = 1;
        cfg.snapshot_indices = hf::all_indices(shape);
        hf::SolveResult result = hf::run_wfcf(target, cfg);
        hf::Trajectory& traj = *result.trajectory;

        if (args.fault == "parallel-grad") {
            // Negative control: make one recorded gradient radial instead of
            // tangential; theorem1 must now fail.
            const std::size_t k = traj.iters.size() / 2;
            traj.gradients[k][0] = 0.25 * traj.params[k][0];
            std::fprintf(stderr, "note: injected a radial gradient at iter %zu index %zu\n",
                         traj.iters[k], traj.indices[0]);
        }

        if (wants("theorem1")) reports.push_back(hf::check_theorem1(traj));
        if (wants("theorem2")) reports.push_back(hf::check_theorem2(traj, /*feasible_target=*/true));
        if (wants("corollary1")) reports.push_back(hf::check_corollary1(traj, cfg.learning_rate));
    }

    if (wants("wiener-khinchin")) {
        const hf::ComplexGrid h =
            hf::project_phase_only(hf::init_cartesian(hf::GridShape::line(args.wk_n), args.seed));
        const double dev = hf::wiener_khinchin_check(h);
        hf::TheoremReport r;
        r.name = "wiener-khinchin-spectrum";
        r.samples_checked = args.wk_n;
        r.max_violation = dev;
        r.tolerance = 1e-8;
        r.pass = dev <= r.tolerance;
        reports.push_back(r);
    }

    bool all_pass = true;
    for (const auto& r : reports) {
        std::printf("%s\n", hf::to_text(r).c_str());
        all_pass = all_pass && r.pass;
    }

    if (!args.out.empty()) {
        const fs::path dir(args.out);
        fs::create_directories(dir);
        json jr = json::array();
        std::ofstream text(dir / "report.txt");
        for (const auto& r : reports) {
            jr.push_back(report_json(r));
            text << hf::to_text(r) << "\n";
        }
        std::ofstream js(dir / "report.json");
        js << jr.dump(2) << "\n";
    }

    return all_pass ? exit_ok : exit_verify;
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
    std::string shape = "64";
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_synth(const SynthArgs& args) {
    const hf::GridShape shape = parse_shape(args.shape);
    auto [witness, target] = hf::synthesize_feasible_target(shape, args.seed);

    const fs::path dir(args.out);
    fs::create_directories(dir);
    hf::save_hologram(hf::init_phase_from(witness), dir / "witness_hologram.bin");
    hf::save_intensity(target, dir / "target.pgm", hf::ImageFormat::pgm);
    hf::save_raw_intensity(target, dir / "target.f64");

    json manifest;
    manifest["command"] = "synth";
    manifest["shape"] = shape.str();
    manifest["seed"] = args.seed;
    manifest["outputs"] = {"witness_hologram.bin", "target.pgm", "target.f64"};
    write_manifest(dir, manifest);

    double sum = 0.0;
    for (double v : target.data) sum += v;
    std::printf("synth %s seed %llu: target sum %.6g (N^2 = %.6g) -> %s\n", shape.str().c_str(),
                static_cast<unsigned long long>(args.seed), sum,
                static_cast<double>(shape.total()) * static_cast<double>(shape.total()),
                dir.string().c_str());
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"holoflow: phase-only hologram optimization and certification"};
    app.set_version_flag("--version", hf::version);
    app.require_subcommand(1);

    SolveArgs solve_args;
    auto* solve = app.add_subcommand("solve", "run one solver on one target");
    solve->set_config("--config");
    solve->add_option("--algo", solve_args.algo, "wfcf|wfpf|wfpf-adam|gs|kaczmarz");
    solve->add_option("--image", solve_args.image, "8-bit grayscale PGM/PNG target");
    solve->add_option("--scene", solve_args.scene, "procedural target, name@shape");
    solve->add_option("--synth", solve_args.synth, "synthetic feasible target, shape N or RxC");
    solve->add_option("--lr", solve_args.lr, "learning rate");
    solve->add_option("--iters", solve_args.iters, "iteration count");
    solve->add_option("--seed", solve_args.seed, "initialization seed");
    solve->add_option("--target-seed", solve_args.target_seed, "witness seed for --synth")
        ->each([&](const std::string&) { solve_args.target_seed_set = true; });
    solve->add_option("--init-variance", solve_args.init_variance, "initial complex variance");
    solve->add_option("--loss-mode", solve_args.loss_mode, "normalized|raw");
    solve->add_option("--log-stride", solve_args.log_stride, "record every k-th iteration");
    solve->add_option("--track", solve_args.track, "linear indices to snapshot")->delimiter(',');
    solve->add_option("--out", solve_args.out, "output directory")->required();

    CompareArgs compare_args;
    auto* compare = app.add_subcommand("compare", "run the five solvers with shared initialization");
    compare->set_config("--config");
    compare->add_option("--image", compare_args.images, "target image (repeatable)");
    compare->add_option("--scene", compare_args.scenes, "procedural target name@shape (repeatable)");
    compare->add_option("--synth", compare_args.synths, "synthetic feasible target shape (repeatable)");
    compare->add_option("--lr", compare_args.lr, "fixed learning rate for wfcf/wfpf");
    compare->add_option("--adam-lr", compare_args.adam_lr, "initial learning rate for wfpf-adam");
    compare->add_option("--iters", compare_args.iters, "iteration count");
    compare->add_option("--seed", compare_args.seed, "shared initialization seed");
    compare->add_option("--loss-mode", compare_args.loss_mode, "normalized|raw");
    compare->add_option("--log-stride", compare_args.log_stride, "record every k-th iteration");
    compare->add_option("--out", compare_args.out, "output directory")->required();

    VerifyArgs verify_args;
    auto* verify = app.add_subcommand("verify", "certify the theoretical guarantees numerically");
    verify->set_config("--config");
    verify->add_option("--shape", verify_args.shape, "grid shape, N or RxC");
    verify->add_option("--seed", verify_args.seed, "initialization seed");
    verify->add_option("--iters", verify_args.iters, "wfcf iterations for the checked run");
    verify->add_option("--lr", verify_args.lr, "learning rate for the checked run");
    verify->add_option("--checker", verify_args.checkers,
                       "theorem1,theorem2,corollary1,wiener-khinchin (default all)")
        ->delimiter(',');
    verify->add_option("--wk-n", verify_args.wk_n, "size for the wiener-khinchin check");
    verify->add_option("--fault", verify_args.fault, "inject a fault (parallel-grad)");
    verify->add_option("--out", verify_args.out, "directory for report.txt/report.json");

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "write a synthetic feasible target and its witness");
    synth->set_config("--config");
    synth->add_option("--shape", synth_args.shape, "grid shape, N or RxC");
    synth->add_option("--seed", synth_args.seed, "witness seed");
    synth->add_option("--out", synth_args.out, "output directory")->required();

    try {
        app.parse(argc, argv);
        if (solve->parsed()) return cmd_solve(solve_args);
        if (compare->parsed()) return cmd_compare(compare_args);
        if (verify->parsed()) return cmd_verify(verify_args);
        if (synth->parsed()) return cmd_synth(synth_args);
        return exit_config;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    } catch (const hf::numeric_error& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return exit_numeric;
    } catch (const hf::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_config;
    } catch (const hf::io_error& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return exit_config;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_config;
    }
}
