#include "firm/cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "firm/eval.hpp"
#include "firm/io.hpp"
#include "firm/projector.hpp"
#include "firm/sim.hpp"
#include "firm/solver.hpp"
#include "firm/toeplitz.hpp"

namespace firm::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

class Stopwatch {
public:
    [[nodiscard]] double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json ctf_to_json(const CtfParams& p) {
    return {{"defocus_um", p.defocus_um},       {"cs_mm", p.cs_mm},       {"lambda_pm", p.lambda_pm},
            {"amplitude_contrast", p.amplitude_contrast}, {"b_factor", p.b_factor}, {"pixel_size", p.pixel_size}};
}

CtfParams ctf_from_json(const json& j) {
    CtfParams p;
    p.defocus_um = j.at("defocus_um").get<double>();
    p.cs_mm = j.at("cs_mm").get<double>();
    p.lambda_pm = j.at("lambda_pm").get<double>();
    p.amplitude_contrast = j.at("amplitude_contrast").get<double>();
    p.b_factor = j.at("b_factor").get<double>();
    p.pixel_size = j.at("pixel_size").get<double>();
    return p;
}

Volume read_volume(const fs::path& path, double pixel_size) {
    auto values = io::read_f32(path);
    const auto n = static_cast<int>(std::llround(std::cbrt(static_cast<double>(values.size()))));
    if (static_cast<std::size_t>(n) * n * n != values.size() || n < 4 || n % 2 != 0) {
        throw ValidationError(path.string() + " does not hold an even-sided cubic volume (" +
                              std::to_string(values.size()) + " values)");
    }
    return Volume(RealGrid(n, std::move(values)), pixel_size);
}

void write_fsc_csv(const fs::path& path, const eval::FscCurve& curve) {
    std::ostringstream out;
    out << "shell_index,spatial_freq_inv_angstrom,fsc,voxel_count\n";
    for (const auto& s : curve.shells) {
        out << s.index << ',' << fmt(s.frequency) << ',' << (s.fsc ? fmt(*s.fsc) : "") << ',' << s.voxels << '\n';
    }
    io::write_text_atomic(path, out.str());
}

}  // namespace

json Manifest::to_json() const {
    json euler_list = json::array();
    for (const auto& e : euler) {
        euler_list.push_back({e.rot, e.tilt, e.psi});
    }
    json ctf_list = json::array();
    for (const auto& p : ctf) {
        ctf_list.push_back(ctf_to_json(p));
    }
    json j;
    j["n"] = n;
    j["m"] = m;
    j["pixel_size"] = pixel_size;
    j["tilt_deg"] = tilt_deg;
    j["snr"] = std::isinf(snr) ? json("inf") : json(snr);
    j["seed"] = seed;
    j["nufft_eps"] = nufft_eps;
    j["euler_zyz_deg"] = std::move(euler_list);
    j["defocus_group"] = defocus_group;
    j["ctf"] = std::move(ctf_list);
    j["files"] = {{"images", images_file}, {"truth", truth_file}};
    return j;
}

Manifest Manifest::from_json(const json& j) {
    Manifest mf;
    try {
        mf.n = j.at("n").get<int>();
        mf.m = j.at("m").get<int>();
        mf.pixel_size = j.at("pixel_size").get<double>();
        mf.tilt_deg = j.at("tilt_deg").get<double>();
        const auto& snr = j.at("snr");
        mf.snr = snr.is_string() && snr.get<std::string>() == "inf" ? std::numeric_limits<double>::infinity()
                                                                     : snr.get<double>();
        mf.seed = j.at("seed").get<std::uint64_t>();
        mf.nufft_eps = j.value("nufft_eps", 1e-6);
        for (const auto& e : j.at("euler_zyz_deg")) {
            if (e.size() != 3) {
                throw ValidationError("euler_zyz_deg entries need three angles");
            }
            mf.euler.push_back({e[0].get<double>(), e[1].get<double>(), e[2].get<double>()});
        }
        mf.defocus_group = j.at("defocus_group").get<std::vector<int>>();
        for (const auto& c : j.at("ctf")) {
            mf.ctf.push_back(ctf_from_json(c));
        }
        mf.images_file = j.at("files").at("images").get<std::string>();
        mf.truth_file = j.at("files").at("truth").get<std::string>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed manifest: ") + e.what());
    }
    return mf;
}

void Manifest::validate() const {
    if (n < 4 || n % 2 != 0) {
        throw ValidationError("manifest n must be even and at least 4");
    }
    if (m < 1) {
        throw ValidationError("manifest m must be positive");
    }
    if (euler.size() != static_cast<std::size_t>(m) || defocus_group.size() != static_cast<std::size_t>(m)) {
        throw ValidationError("manifest arrays must have m entries");
    }
    for (int g : defocus_group) {
        if (g < 0 || (ctf.empty() ? g != 0 : g >= static_cast<int>(ctf.size()))) {
            throw ValidationError("manifest refers to missing defocus group " + std::to_string(g));
        }
    }
    try {
        for (const auto& p : ctf) {
            p.validate();
        }
    } catch (const std::invalid_argument& e) {
        throw ValidationError(std::string("manifest CTF: ") + e.what());
    }
}

Manifest load_manifest(const fs::path& dataset_dir) {
    const auto path = dataset_dir / "manifest.json";
    if (!fs::exists(path)) {
        throw ValidationError("no manifest.json in " + dataset_dir.string());
    }
    json j;
    try {
        j = json::parse(io::read_text(path));
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("manifest is not valid JSON: ") + e.what());
    }
    auto mf = Manifest::from_json(j);
    mf.validate();
    const auto images = dataset_dir / mf.images_file;
    const auto expected = static_cast<std::uintmax_t>(mf.n) * mf.n * mf.m * 4;
    if (!fs::exists(images) || fs::file_size(images) != expected) {
        throw ValidationError(images.string() + " is missing or does not hold m images of n x n float32");
    }
    return mf;
}

void cmd_simulate(const SimulateOptions& opts) {
    if (opts.out.empty()) {
        throw ValidationError("--out is required");
    }
    if (opts.groups < 0) {
        throw ValidationError("--groups must be non-negative");
    }
    sim::DatasetSpec spec;
    spec.n = opts.n;
    spec.m = opts.m;
    spec.tilt_deg = opts.tilt_deg;
    spec.snr = opts.snr;
    spec.pixel_size = opts.pixel_size;
    spec.seed = opts.seed;
    spec.nufft_accuracy = opts.nufft_eps;
    if (opts.groups > 0) {
        spec.defocus_groups = reference_ctf_groups(opts.groups, opts.pixel_size);
    }
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw ValidationError(e.what());
    }
    const auto data = sim::make_dataset(spec, sim::default_phantom(spec.n));

    Manifest mf;
    mf.n = spec.n;
    mf.m = spec.m;
    mf.pixel_size = spec.pixel_size;
    mf.tilt_deg = spec.tilt_deg;
    mf.snr = spec.snr;
    mf.seed = spec.seed;
    mf.nufft_eps = spec.nufft_accuracy;
    mf.euler = data.angles;
    mf.defocus_group = data.defocus_group;
    mf.ctf = spec.defocus_groups;

    fs::create_directories(opts.out);
    io::write_f32(opts.out / mf.images_file, data.images.pixels());
    io::write_f32(opts.out / mf.truth_file, data.truth.grid().data());
    io::write_text_atomic(opts.out / "manifest.json", mf.to_json().dump(2) + "\n");
}

ReconstructTiming cmd_reconstruct(const ReconstructOptions& opts) {
    if (opts.out.empty()) {
        throw ValidationError("--out is required");
    }
    if (opts.iters < 1) {
        throw ValidationError("--iters must be at least 1");
    }
    if (opts.residual_every < 0) {
        throw ValidationError("--residual-every must be non-negative");
    }
    const Stopwatch total;
    ReconstructTiming timing;
    const Manifest mf = load_manifest(opts.dataset);

    Stopwatch watch;
    std::vector<Rotation> rotations;
    rotations.reserve(mf.euler.size());
    for (const auto& e : mf.euler) {
        rotations.push_back(Rotation::from_euler(e));
    }
    std::optional<CtfAssignment> ctf;
    if (!mf.ctf.empty()) {
        ctf = CtfAssignment{mf.ctf, mf.defocus_group};
    }
    std::optional<ProjectionOperator> op_storage;
    try {
        op_storage.emplace(mf.n, std::move(rotations), ctf, opts.nufft_eps);
    } catch (const std::invalid_argument& e) {
        throw ValidationError(e.what());
    }
    const ProjectionOperator& op = *op_storage;
    const ImageStack images(mf.n, mf.m, io::read_f32(opts.dataset / mf.images_file));
    timing.setup = watch.seconds();

    watch = Stopwatch{};
    const auto b = slices_from_images(images, op.grid());
    timing.fft_images = watch.seconds();

    watch = Stopwatch{};
    const ComplexGrid rhs = op.adjoint(b);
    timing.backprojection = watch.seconds();

    watch = Stopwatch{};
    std::optional<ToeplitzKernel> kernel;
    const auto meta = describe(op);
    if (opts.kernel_cache) {
        try {
            kernel = load_kernel(*opts.kernel_cache, meta);
        } catch (const KernelCacheMismatch& e) {
            throw ValidationError(e.what());
        }
        timing.kernel_cache_hit = kernel.has_value();
    }
    if (!kernel) {
        kernel = build_toeplitz_kernel(op);
        if (opts.kernel_cache) {
            save_kernel(*opts.kernel_cache, *kernel);
        }
    }
    timing.kernel = watch.seconds();
    timing.min_spectrum = kernel->diagnostics().min_spectrum;

    watch = Stopwatch{};
    CgOptions cg;
    cg.max_iters = opts.iters;
    cg.record_data_residual_every = opts.residual_every;
    DataResidualFn residual_fn;
    if (opts.residual_every > 0) {
        residual_fn = data_residual(op, b);
    }
    auto result = cg_solve(*kernel, rhs, cg, residual_fn);
    if (result.trace.iterations.size() >= 3) {
        annotate_phases(result.trace);
    }
    timing.cg_total = watch.seconds();
    timing.cg_iterations = static_cast<int>(result.trace.iterations.size());

    std::ostringstream csv;
    csv << "iter,normal_residual,objective,data_residual,phase\n";
    csv << "0," << fmt(result.trace.initial_residual) << ",0,";
    if (opts.residual_every > 0) {
        csv << fmt(residual_fn(RealGrid(mf.n)));
    }
    csv << ",\n";
    for (const auto& it : result.trace.iterations) {
        csv << it.iter << ',' << fmt(it.normal_residual) << ',' << fmt(it.objective) << ','
            << (it.data_residual ? fmt(*it.data_residual) : "") << ',' << (it.phase ? to_string(*it.phase) : "")
            << '\n';
    }

    fs::create_directories(opts.out);
    io::write_f32(opts.out / "recon.f32", result.x.data());
    io::write_text_atomic(opts.out / "residuals.csv", csv.str());
    timing.total = total.seconds();

    const json t = {
        {"setup", timing.setup},
        {"fft_images", timing.fft_images},
        {"backprojection", timing.backprojection},
        {"kernel", timing.kernel},
        {"kernel_cache_hit", timing.kernel_cache_hit},
        {"cg_iterations", timing.cg_iterations},
        {"cg_total", timing.cg_total},
        {"cg_per_iteration", timing.cg_iterations > 0 ? timing.cg_total / timing.cg_iterations : 0.0},
        {"total", timing.total},
    };
    io::write_text_atomic(opts.out / "timing.json", t.dump(2) + "\n");
    return timing;
}

void cmd_evaluate(const EvaluateOptions& opts) {
    if (!(opts.pixel_size > 0.0)) {
        throw ValidationError("--pixel-size must be positive");
    }
    const Volume recon = read_volume(opts.recon, opts.pixel_size);
    const Volume truth = read_volume(opts.truth, opts.pixel_size);
    if (recon.n() != truth.n()) {
        throw ValidationError("recon side " + std::to_string(recon.n()) + " does not match truth side " +
                              std::to_string(truth.n()));
    }
    const fs::path prefix(opts.out_prefix);
    const auto target = [&](const char* name) { return fs::path(opts.out_prefix + name); };
    if (prefix.has_parent_path()) {
        fs::create_directories(prefix.parent_path());
    }
    if (!opts.tilt_deg) {
        write_fsc_csv(target("fsc_all.csv"), eval::fsc(recon, truth));
        return;
    }
    if (!(*opts.tilt_deg > 0.0 && *opts.tilt_deg < 90.0)) {
        throw ValidationError("--tilt must lie strictly between 0 and 90 degrees");
    }
    const auto parts = eval::fsc_partitioned(recon, truth, eval::missing_cone_mask(recon.n(), *opts.tilt_deg));
    write_fsc_csv(target("fsc_all.csv"), parts.all);
    write_fsc_csv(target("fsc_exclude_cone.csv"), parts.exclude);
    write_fsc_csv(target("fsc_within_cone.csv"), parts.within);
}

}  // namespace firm::cli
