#include "isar/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "isar/dataset.hpp"
#include "isar/error.hpp"
#include "isar/render.hpp"
#include "isar/slicy_validation.hpp"

namespace isar::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& message) { throw Error("config", message); }

template <typename T>
T field(const json& j, const std::string& name) {
    if (!j.contains(name)) config_error("missing field '" + name + "'");
    try {
        return j.at(name).get<T>();
    } catch (const json::exception&) {
        config_error("field '" + name + "' has the wrong type");
    }
}

template <typename T>
void maybe(const json& j, const std::string& name, T& target) {
    if (j.contains(name)) target = field<T>(j, name);
}

/// Waveform and ray settings shared by every simulating subcommand.
struct SimulationFlags {
    WaveformSpec waveform;
    RaySpec ray;

    void attach(CLI::App& app) {
        app.add_option("--fc", waveform.center_frequency_hz, "Center frequency (Hz)");
        app.add_option("--bandwidth", waveform.bandwidth_hz, "Swept bandwidth (Hz)");
        app.add_option("--span", waveform.aspect_span_deg, "Coherent aspect span (degrees)");
        app.add_option("--rays", ray.rays_per_axis, "Launch grid rays per axis");
        app.add_option("--bounces", ray.max_bounces, "Maximum specular bounces (1-3)");
    }
};

void apply_waveform_json(const json& j, WaveformSpec& wf) {
    maybe(j, "center_frequency_hz", wf.center_frequency_hz);
    maybe(j, "bandwidth_hz", wf.bandwidth_hz);
    maybe(j, "aspect_span_deg", wf.aspect_span_deg);
    maybe(j, "motion_compensation", wf.motion_compensation);
}

void apply_ray_json(const json& j, RaySpec& ray) {
    maybe(j, "rays_per_axis", ray.rays_per_axis);
    maybe(j, "max_bounces", ray.max_bounces);
    maybe(j, "shadowing", ray.shadowing);
    maybe(j, "jitter", ray.jitter);
}

std::vector<std::string> split_pngs(const ImageStack& stack, const fs::path& dir, const std::string& stem,
                                    double dynamic_range_db) {
    std::vector<std::string> names;
    for (std::size_t k = 0; k < stack.channels.size(); ++k) {
        const std::string name = stem + "_ch" + std::to_string(k) + ".png";
        write_png(render_magnitude(stack.channels[k], dynamic_range_db), dir / name);
        names.push_back(name);
    }
    return names;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string model;
    std::string target = "F15";
    int radars = 1;
    int offset = 0;
    double elevation = 15.0;
    double snr = kNoNoiseSnrDb;
    std::uint64_t seed = 0;
    std::string out;
    bool png = false;
    double scale = 1.0;
    double ground_distance = 1000.0;
    double dynamic_range = 40.0;
    SimulationFlags sim;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
    const auto loaded = load_stl_file(a.model, {a.scale, true});
    if (loaded.dropped_degenerate > 0) err << "dropped " << loaded.dropped_degenerate << " degenerate triangles\n";

    ArrayConfig array;
    array.num_radars = a.radars;
    array.elevations_deg = {a.elevation};
    array.ground_distance_m = a.ground_distance;
    radar_azimuths(array, a.offset);  // validates the placement before any tracing

    DatasetManifest manifest;
    for (auto name : class_table()) manifest.class_table.emplace_back(name);
    manifest.targets = {a.target};
    manifest.radar_count = a.radars;
    manifest.elevations_deg = {a.elevation};
    manifest.noise_levels_db = {a.snr};
    manifest.ground_distance_m = a.ground_distance;
    manifest.master_seed = a.seed;
    manifest.waveform = a.sim.waveform;
    manifest.ray = a.sim.ray;
    manifest.ray.jitter_seed = a.seed;

    SampleEntry entry;
    entry.byte_offset = dataset_header_bytes();
    entry.target = a.target;
    entry.label = class_index(a.target);
    entry.elevation_deg = a.elevation;
    entry.offset_deg = a.offset;
    entry.snr_db = a.snr;
    entry.seed = a.seed;
    entry.azimuths_deg = radar_azimuths(array, a.offset);
    manifest.samples.push_back(entry);

    const ImageStack stack = generate_stack(loaded.mesh, a.target, array, a.offset, a.elevation, {a.snr, a.seed},
                                            manifest.waveform, manifest.ray);
    const fs::path dir(a.out);
    write_dataset(manifest, {&stack, 1}, dir);

    json result = {{"out", dir.string()}, {"channels", stack.channels.size()}, {"azimuths_deg", entry.azimuths_deg}};
    if (a.png) result["pngs"] = split_pngs(stack, dir, "stack", a.dynamic_range);
    out << result.dump() << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- dataset

struct DatasetArgs {
    std::string config;
    std::string out;
    int workers = 1;
    std::optional<int> radars;
    std::optional<std::uint64_t> seed;
    std::optional<int> rays;
    bool dry_run = false;
};

struct TargetModel {
    std::string name;
    fs::path path;
    double scale = 1.0;
};

int cmd_dataset(const DatasetArgs& a, std::ostream& out, std::ostream& err) {
    std::ifstream in(a.config);
    if (!in) throw Error("config", "cannot open '" + a.config + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& ex) {
        config_error(std::string("not valid JSON: ") + ex.what());
    }
    if (field<int>(j, "version") != 1) config_error("field 'version' must be 1");

    DatasetPlan plan;
    std::vector<TargetModel> models;
    const fs::path base = fs::path(a.config).parent_path();
    if (!j.contains("targets") || !j["targets"].is_array()) config_error("field 'targets' must be an array");
    for (const auto& t : j["targets"]) {
        TargetModel m;
        m.name = field<std::string>(t, "name");
        const fs::path p = field<std::string>(t, "model");
        m.path = p.is_absolute() ? p : base / p;
        maybe(t, "scale", m.scale);
        plan.targets.push_back(m.name);
        models.push_back(m);
    }
    plan.array.num_radars = field<int>(j, "radar_count");
    maybe(j, "elevations_deg", plan.array.elevations_deg);
    maybe(j, "ground_distance_m", plan.array.ground_distance_m);
    maybe(j, "noise_levels_db", plan.noise_levels_db);
    maybe(j, "master_seed", plan.master_seed);
    if (j.contains("waveform")) apply_waveform_json(j["waveform"], plan.waveform);
    if (j.contains("ray")) apply_ray_json(j["ray"], plan.ray);
    if (a.radars) plan.array.num_radars = *a.radars;
    if (a.seed) plan.master_seed = *a.seed;
    if (a.rays) plan.ray.rays_per_axis = *a.rays;

    if (a.dry_run) {
        const DatasetManifest manifest = enumerate_dataset(plan);
        err << manifest.samples.size() << " samples\n";
        out << json{{"sample_count", manifest.samples.size()}, {"dry_run", true}}.dump() << "\n";
        return kExitOk;
    }

    plan.validate();
    SceneMap scenes;
    for (const auto& m : models) {
        const auto loaded = load_stl_file(m.path.string(), {m.scale, true});
        err << "loaded " << m.name << ": " << loaded.mesh.triangle_count() << " triangles\n";
        scenes[m.name] = std::make_shared<const ScatteringScene>(loaded.mesh);
    }

    const auto t0 = std::chrono::steady_clock::now();
    const DatasetManifest manifest =
        generate_dataset(plan, scenes, a.out, a.workers, [&](std::size_t done, std::size_t total) {
            err << "\rplacements " << done << "/" << total << std::flush;
        });
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    err << "\n" << manifest.samples.size() << " samples\n";

    // Re-open to prove the files validate end to end.
    DatasetReader reader(a.out);
    std::size_t verified = 0;
    while (reader.next()) ++verified;
    out << json{{"sample_count", manifest.samples.size()},
                {"verified", verified},
                {"out", a.out},
                {"seconds", seconds}}
               .dump()
        << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- render

struct RenderArgs {
    std::string dataset;
    std::size_t sample = 0;
    std::string out;
    double dynamic_range = 40.0;
};

int cmd_render(const RenderArgs& a, std::ostream& out, std::ostream&) {
    DatasetReader reader(a.dataset);
    const ImageStack stack = reader.read(a.sample);
    fs::create_directories(a.out);
    const auto names = split_pngs(stack, a.out, "sample" + std::to_string(a.sample), a.dynamic_range);
    out << json{{"sample", a.sample}, {"target", stack.meta.target}, {"pngs", names}}.dump() << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- validate-slicy

struct SlicyArgs {
    std::string model;
    std::string out;
    std::vector<double> elevations{15.0, 30.0};
    double scale = 1.0;
    int workers = 1;
    double dynamic_range = 40.0;
    SimulationFlags sim;
};

int cmd_validate_slicy(const SlicyArgs& a, std::ostream& out, std::ostream& err) {
    const auto loaded = load_stl_file(a.model, {a.scale, true});
    SlicyValidationOptions options;
    options.elevations_deg = a.elevations;
    options.waveform = a.sim.waveform;
    options.ray = a.sim.ray;
    options.workers = a.workers;
    options.dynamic_range_db = a.dynamic_range;
    options.png_directory = fs::path(a.out);

    const auto t0 = std::chrono::steady_clock::now();
    const SlicyReport report = validate_slicy(loaded.mesh, options);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!report.footprint_within_10pct) {
        err << "warning: footprint " << report.footprint_width_m << " x " << report.footprint_length_m
            << " m deviates more than 10% from " << kSlicyWidthM << " x " << kSlicyLengthM << " m\n";
    }
    const std::string text = report.to_json();
    std::ofstream(fs::path(a.out) / "report.json") << text << "\n";
    out << text << "\n";
    err << "validate-slicy " << (report.passed() ? "PASSED" : "FAILED") << " in " << seconds << " s, "
        << report.aspects.size() << " renders\n";
    return report.passed() ? kExitOk : kExitRuntime;
}

// ---------------------------------------------------------------- info

struct InfoArgs {
    std::string model;
    std::string dataset;
    double scale = 1.0;
};

int cmd_info(const InfoArgs& a, std::ostream& out, std::ostream&) {
    if (a.model.empty() == a.dataset.empty()) throw Error("info", "pass exactly one of --model or --dataset");
    if (!a.model.empty()) {
        const auto loaded = load_stl_file(a.model, {a.scale, false});
        const auto& m = loaded.mesh;
        const Vec3 lo = m.bounds_min();
        const Vec3 hi = m.bounds_max();
        out << json{{"format", loaded.binary ? "binary" : "ascii"},
                    {"triangles", m.triangle_count()},
                    {"vertices", m.vertices().size()},
                    {"dropped_degenerate", loaded.dropped_degenerate},
                    {"normals_recomputed", loaded.normals_recomputed},
                    {"bounds_min", {lo.x, lo.y, lo.z}},
                    {"bounds_max", {hi.x, hi.y, hi.z}},
                    {"surface_area_m2", m.surface_area()}}
                   .dump()
            << "\n";
        return kExitOk;
    }
    DatasetReader reader(a.dataset);
    const auto& m = reader.manifest();
    std::map<std::string, std::size_t> per_noise;
    std::vector<std::size_t> per_fold(kNumFolds, 0);
    for (const auto& s : m.samples) {
        std::ostringstream key;
        key << s.snr_db;
        ++per_noise[key.str()];
        ++per_fold[static_cast<std::size_t>(s.fold)];
    }
    out << json{{"sample_count", m.samples.size()},
                {"radar_count", m.radar_count},
                {"targets", m.targets},
                {"elevations_deg", m.elevations_deg},
                {"samples_per_noise_level", per_noise},
                {"samples_per_fold", per_fold},
                {"master_seed", m.master_seed},
                {"generator", m.generator}}
               .dump()
        << "\n";
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"ISAR target simulation and dataset generation", "isar"};
    app.require_subcommand(1);

    SimulateArgs sim_args;
    auto* simulate = app.add_subcommand("simulate", "Image one array placement of a model");
    simulate->add_option("--model", sim_args.model, "Target STL")->required();
    simulate->add_option("--target", sim_args.target, "Class name used as the label");
    simulate->add_option("--radars", sim_args.radars, "Number of mono-static radars");
    simulate->add_option("--offset", sim_args.offset, "Array placement offset (degrees)");
    simulate->add_option("--elevation", sim_args.elevation, "Elevation (degrees)");
    simulate->add_option("--snr", sim_args.snr, "SNR in dB; 201 means no noise");
    simulate->add_option("--seed", sim_args.seed, "Noise and jitter seed");
    simulate->add_option("--out", sim_args.out, "Output directory")->required();
    simulate->add_flag("--png", sim_args.png, "Also render each channel");
    simulate->add_option("--scale", sim_args.scale, "Model unit scale to meters");
    simulate->add_option("--ground-distance", sim_args.ground_distance, "Radar ground distance (m)");
    simulate->add_option("--dynamic-range", sim_args.dynamic_range, "PNG dynamic range (dB)");
    sim_args.sim.attach(*simulate);

    DatasetArgs ds_args;
    auto* dataset = app.add_subcommand("dataset", "Generate a full dataset from a JSON config");
    dataset->add_option("--config", ds_args.config, "Dataset config JSON")->required();
    dataset->add_option("--out", ds_args.out, "Output directory")->required();
    dataset->add_option("--workers", ds_args.workers, "Worker threads")->check(CLI::PositiveNumber);
    dataset->add_option("--radars", ds_args.radars, "Override radar_count");
    dataset->add_option("--seed", ds_args.seed, "Override master_seed");
    dataset->add_option("--rays", ds_args.rays, "Override rays_per_axis");
    dataset->add_flag("--dry-run", ds_args.dry_run, "Only enumerate and count samples");

    RenderArgs render_args;
    auto* render = app.add_subcommand("render", "Render one stored stack to PNG");
    render->add_option("--dataset", render_args.dataset, "Dataset directory")->required();
    render->add_option("--sample", render_args.sample, "Sample index");
    render->add_option("--out", render_args.out, "Output directory")->required();
    render->add_option("--dynamic-range", render_args.dynamic_range, "Dynamic range (dB)");

    SlicyArgs slicy_args;
    auto* slicy = app.add_subcommand("validate-slicy", "Render and check the calibration target");
    slicy->add_option("--model", slicy_args.model, "Calibration target STL")->required();
    slicy->add_option("--out", slicy_args.out, "Output directory")->required();
    slicy->add_option("--elevations", slicy_args.elevations, "Elevations (degrees)")->delimiter(',');
    slicy->add_option("--scale", slicy_args.scale, "Model unit scale to meters");
    slicy->add_option("--workers", slicy_args.workers, "Worker threads")->check(CLI::PositiveNumber);
    slicy->add_option("--dynamic-range", slicy_args.dynamic_range, "Dynamic range (dB)");
    slicy_args.sim.attach(*slicy);

    InfoArgs info_args;
    auto* info = app.add_subcommand("info", "Describe a model or a dataset");
    info->add_option("--model", info_args.model, "STL file");
    info->add_option("--dataset", info_args.dataset, "Dataset directory");
    info->add_option("--scale", info_args.scale, "Model unit scale to meters");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    }

    try {
        if (*simulate) return cmd_simulate(sim_args, out, err);
        if (*dataset) return cmd_dataset(ds_args, out, err);
        if (*render) return cmd_render(render_args, out, err);
        if (*slicy) return cmd_validate_slicy(slicy_args, out, err);
        if (*info) return cmd_info(info_args, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}

}  // namespace isar::cli
