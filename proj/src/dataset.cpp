#include "isar/dataset.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include <json.hpp>

#include "isar/error.hpp"
#include "isar/parallel.hpp"
#include "isar/random.hpp"

namespace isar {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& message) { throw Error("dataset", message); }

constexpr std::size_t kHeaderBytes = 8 + 5 * 4;
constexpr std::size_t kSampleMetaBytes = 1 + 4 + 2 + 4 + 8;
constexpr std::size_t kPixelsPerChannel = static_cast<std::size_t>(kImageSize) * kImageSize;

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}
void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void put_f32(std::vector<std::uint8_t>& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

std::uint16_t get_u16(const std::uint8_t* p) { return static_cast<std::uint16_t>(p[0] | (p[1] << 8)); }
std::uint32_t get_u32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
std::uint64_t get_u64(const std::uint8_t* p) {
    return static_cast<std::uint64_t>(get_u32(p)) | (static_cast<std::uint64_t>(get_u32(p + 4)) << 32);
}
float get_f32(const std::uint8_t* p) { return std::bit_cast<float>(get_u32(p)); }

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
    uLong crc = crc32(0L, Z_NULL, 0);
    crc = crc32(crc, bytes.data(), static_cast<uInt>(bytes.size()));
    return static_cast<std::uint32_t>(crc);
}

std::vector<std::uint8_t> encode_header(std::uint32_t count, std::uint32_t radars) {
    std::vector<std::uint8_t> out(kDatasetMagic.begin(), kDatasetMagic.end());
    put_u32(out, kDatasetVersion);
    put_u32(out, count);
    put_u32(out, radars);
    put_u32(out, kImageSize);
    put_u32(out, kImageSize);
    return out;
}

/// Unbiased integer in [0, bound).
std::uint64_t uniform_below(std::mt19937_64& engine, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    for (;;) {
        const std::uint64_t x = engine();
        if (x < limit) return x % bound;
    }
}

json waveform_json(const WaveformSpec& wf) {
    return {{"center_frequency_hz", wf.center_frequency_hz}, {"bandwidth_hz", wf.bandwidth_hz},
            {"num_freq_steps", wf.num_freq_steps},           {"num_pulses", wf.num_pulses},
            {"aspect_span_deg", wf.aspect_span_deg},         {"motion_compensation", wf.motion_compensation}};
}

WaveformSpec waveform_from(const json& j) {
    WaveformSpec wf;
    wf.center_frequency_hz = j.at("center_frequency_hz").get<double>();
    wf.bandwidth_hz = j.at("bandwidth_hz").get<double>();
    wf.num_freq_steps = j.at("num_freq_steps").get<int>();
    wf.num_pulses = j.at("num_pulses").get<int>();
    wf.aspect_span_deg = j.at("aspect_span_deg").get<double>();
    wf.motion_compensation = j.at("motion_compensation").get<bool>();
    return wf;
}

json ray_json(const RaySpec& r) {
    return {{"rays_per_axis", r.rays_per_axis}, {"max_bounces", r.max_bounces}, {"wavelength_m", r.wavelength_m},
            {"shadowing", r.shadowing},         {"jitter", r.jitter}};
}

RaySpec ray_from(const json& j) {
    RaySpec r;
    r.rays_per_axis = j.at("rays_per_axis").get<int>();
    r.max_bounces = j.at("max_bounces").get<int>();
    r.wavelength_m = j.at("wavelength_m").get<double>();
    r.shadowing = j.at("shadowing").get<bool>();
    r.jitter = j.at("jitter").get<bool>();
    return r;
}

void check_against_manifest(const ImageStack& stack, const SampleEntry& entry) {
    const bool same = stack.label == entry.label &&
                      static_cast<float>(stack.meta.elevation_deg) == static_cast<float>(entry.elevation_deg) &&
                      stack.meta.offset_deg == entry.offset_deg &&
                      static_cast<float>(stack.meta.snr_db) == static_cast<float>(entry.snr_db) &&
                      stack.meta.seed == entry.seed;
    if (!same) fail("sample " + std::to_string(entry.index) + " does not match its manifest entry");
}

}  // namespace

const std::array<std::string_view, kNumClasses>& class_table() {
    static constexpr std::array<std::string_view, kNumClasses> table{"F15",   "F16",   "J11",   "J15",
                                                                      "MIG29", "MIG35", "EF2000"};
    return table;
}

int class_index(std::string_view name) {
    const auto& table = class_table();
    const auto it = std::find(table.begin(), table.end(), name);
    if (it == table.end()) fail("unknown target '" + std::string(name) + "'; expected one of F15, F16, J11, J15, MIG29, MIG35, EF2000");
    return static_cast<int>(it - table.begin());
}

std::uint64_t SeedDerivation::stack_seed(std::uint64_t master, int label, double elevation_deg, int offset_deg,
                                         double snr_db) {
    return hash_words({master, static_cast<std::uint64_t>(label), double_bits(elevation_deg),
                       static_cast<std::uint64_t>(offset_deg), double_bits(snr_db)});
}

std::uint64_t SeedDerivation::channel_noise_seed(std::uint64_t stack_seed, int radar_index) {
    return hash_words({stack_seed, static_cast<std::uint64_t>(radar_index)});
}

std::uint64_t SeedDerivation::jitter_base(std::uint64_t master, int label, double elevation_deg, int offset_deg) {
    return hash_words({master, static_cast<std::uint64_t>(label), double_bits(elevation_deg),
                       static_cast<std::uint64_t>(offset_deg)});
}

std::uint64_t SeedDerivation::jitter_seed(std::uint64_t master, int label, double elevation_deg, int offset_deg,
                                          int radar_index) {
    return hash_words({jitter_base(master, label, elevation_deg, offset_deg), static_cast<std::uint64_t>(radar_index)});
}

std::vector<ImageStack> generate_stacks(const ScatteringScene& scene, const std::string& target,
                                        const ArrayConfig& array, int offset_deg, double elevation_deg,
                                        std::span<const NoiseSpec> noise, const WaveformSpec& wf, const RaySpec& ray) {
    const int label = class_index(target);
    if (array.num_radars > kMaxRadars) {
        fail("radar count must be <= " + std::to_string(kMaxRadars) + ", got " + std::to_string(array.num_radars));
    }
    const auto azimuths = radar_azimuths(array, offset_deg);
    for (const auto& n : noise) n.validate();

    std::vector<ImageStack> stacks(noise.size());
    for (std::size_t l = 0; l < noise.size(); ++l) {
        stacks[l].label = label;
        stacks[l].meta = {target, elevation_deg, offset_deg, noise[l].snr_db, noise[l].seed, azimuths};
    }
    for (std::size_t k = 0; k < azimuths.size(); ++k) {
        const RadarPose pose = make_pose(azimuths[k], elevation_deg, array.ground_distance_m);
        RaySpec channel_ray = ray;
        channel_ray.jitter_seed = hash_words({ray.jitter_seed, static_cast<std::uint64_t>(k)});
        const PhaseHistory clean = synthesize_phase_history(scene, pose, wf, channel_ray);
        for (std::size_t l = 0; l < noise.size(); ++l) {
            const NoiseSpec channel_noise{noise[l].snr_db,
                                          SeedDerivation::channel_noise_seed(noise[l].seed, static_cast<int>(k))};
            PhaseHistory noisy;
            try {
                noisy = add_noise(clean, channel_noise);
            } catch (const Error& e) {
                std::ostringstream msg;
                msg << target << " seen from azimuth " << azimuths[k] << ", elevation " << elevation_deg
                    << " at " << noise[l].snr_db << " dB: " << e.what();
                fail(msg.str());
            }
            stacks[l].channels.push_back(form_image(noisy));
        }
    }
    return stacks;
}

ImageStack generate_stack(const ScatteringScene& scene, const std::string& target, const ArrayConfig& array,
                          int offset_deg, double elevation_deg, const NoiseSpec& noise, const WaveformSpec& wf,
                          const RaySpec& ray) {
    return std::move(generate_stacks(scene, target, array, offset_deg, elevation_deg, {&noise, 1}, wf, ray).front());
}

ImageStack generate_stack(const TriangleMesh& mesh, const std::string& target, const ArrayConfig& array,
                          int offset_deg, double elevation_deg, const NoiseSpec& noise, const WaveformSpec& wf,
                          const RaySpec& ray) {
    return generate_stack(ScatteringScene(mesh), target, array, offset_deg, elevation_deg, noise, wf, ray);
}

void DatasetPlan::validate() const {
    if (targets.empty()) fail("at least one target is required");
    for (std::size_t i = 0; i < targets.size(); ++i) {
        class_index(targets[i]);
        for (std::size_t j = 0; j < i; ++j) {
            if (targets[i] == targets[j]) fail("target '" + targets[i] + "' is listed twice");
        }
    }
    array.validate();
    if (array.num_radars > kMaxRadars) {
        fail("radar count must be <= " + std::to_string(kMaxRadars) + ", got " + std::to_string(array.num_radars));
    }
    if (noise_levels_db.empty()) fail("at least one noise level is required");
    for (std::size_t i = 0; i < noise_levels_db.size(); ++i) {
        NoiseSpec{noise_levels_db[i], 0}.validate();
        for (std::size_t j = 0; j < i; ++j) {
            if (noise_levels_db[i] == noise_levels_db[j]) fail("noise levels must be distinct");
        }
    }
    waveform.validate();
    ray.validate();
}

DatasetManifest enumerate_dataset(const DatasetPlan& plan) {
    plan.validate();
    DatasetManifest m;
    for (auto name : class_table()) m.class_table.emplace_back(name);
    m.targets = plan.targets;
    m.radar_count = plan.array.num_radars;
    m.elevations_deg = plan.array.elevations_deg;
    m.noise_levels_db = plan.noise_levels_db;
    m.ground_distance_m = plan.array.ground_distance_m;
    m.master_seed = plan.master_seed;
    m.generator = NormalStream::kName;
    m.waveform = plan.waveform;
    m.ray = plan.ray;

    const auto offsets = enumerate_offsets(plan.array);
    const std::size_t record = sample_record_bytes(plan.array.num_radars);
    for (const auto& target : plan.targets) {
        const int label = class_index(target);
        for (double elevation : plan.array.elevations_deg) {
            for (int offset : offsets) {
                const auto azimuths = radar_azimuths(plan.array, offset);
                for (double snr : plan.noise_levels_db) {
                    SampleEntry e;
                    e.index = m.samples.size();
                    e.byte_offset = kHeaderBytes + e.index * record;
                    e.target = target;
                    e.label = label;
                    e.elevation_deg = elevation;
                    e.offset_deg = offset;
                    e.snr_db = snr;
                    e.seed = SeedDerivation::stack_seed(plan.master_seed, label, elevation, offset, snr);
                    e.azimuths_deg = azimuths;
                    m.samples.push_back(std::move(e));
                }
            }
        }
    }

    // Stratified folds per (label, noise level).
    std::map<std::pair<int, std::uint64_t>, std::vector<std::size_t>> strata;
    for (const auto& e : m.samples) strata[{e.label, double_bits(e.snr_db)}].push_back(e.index);
    for (auto& [key, members] : strata) {
        std::mt19937_64 engine(hash_words({plan.master_seed, static_cast<std::uint64_t>(key.first), key.second,
                                           0x666f6c6473ULL /* "folds" */}));
        for (std::size_t i = members.size(); i > 1; --i) {
            std::swap(members[i - 1], members[uniform_below(engine, i)]);
        }
        for (std::size_t pos = 0; pos < members.size(); ++pos) {
            m.samples[members[pos]].fold = static_cast<int>(pos % kNumFolds);
        }
    }
    return m;
}

std::string manifest_to_json(const DatasetManifest& m) {
    json samples = json::array();
    for (const auto& e : m.samples) {
        samples.push_back({{"index", e.index},
                           {"byte_offset", e.byte_offset},
                           {"target", e.target},
                           {"label", e.label},
                           {"elevation_deg", e.elevation_deg},
                           {"offset_deg", e.offset_deg},
                           {"snr_db", e.snr_db},
                           {"seed", e.seed},
                           {"fold", e.fold},
                           {"azimuths_deg", e.azimuths_deg}});
    }
    json j = {{"version", m.version},
              {"format", {{"file", "dataset.bin"},
                          {"magic", std::string(kDatasetMagic.begin(), kDatasetMagic.end())},
                          {"header_bytes", kHeaderBytes},
                          {"record_bytes", sample_record_bytes(m.radar_count)},
                          {"height", kImageSize},
                          {"width", kImageSize},
                          {"checksum", "crc32 (zlib) of each record before its checksum field"}}},
              {"class_table", m.class_table},
              {"targets", m.targets},
              {"radar_count", m.radar_count},
              {"elevations_deg", m.elevations_deg},
              {"noise_levels_db", m.noise_levels_db},
              {"ground_distance_m", m.ground_distance_m},
              {"master_seed", m.master_seed},
              {"generator", m.generator},
              {"seed_derivation", m.seed_derivation},
              {"snr_reference", m.snr_reference},
              {"num_folds", kNumFolds},
              {"waveform", waveform_json(m.waveform)},
              {"ray", ray_json(m.ray)},
              {"sample_count", m.samples.size()},
              {"samples", samples}};
    return j.dump(1) + "\n";
}

DatasetManifest manifest_from_json(const std::string& text) {
    DatasetManifest m;
    try {
        const json j = json::parse(text);
        m.version = j.at("version").get<std::uint32_t>();
        if (m.version != kDatasetVersion) {
            fail("manifest version " + std::to_string(m.version) + " is not supported (expected " +
                 std::to_string(kDatasetVersion) + ")");
        }
        m.class_table = j.at("class_table").get<std::vector<std::string>>();
        m.targets = j.at("targets").get<std::vector<std::string>>();
        m.radar_count = j.at("radar_count").get<int>();
        m.elevations_deg = j.at("elevations_deg").get<std::vector<double>>();
        m.noise_levels_db = j.at("noise_levels_db").get<std::vector<double>>();
        m.ground_distance_m = j.at("ground_distance_m").get<double>();
        m.master_seed = j.at("master_seed").get<std::uint64_t>();
        m.generator = j.at("generator").get<std::string>();
        m.seed_derivation = j.at("seed_derivation").get<std::string>();
        m.snr_reference = j.at("snr_reference").get<std::string>();
        m.waveform = waveform_from(j.at("waveform"));
        m.ray = ray_from(j.at("ray"));
        for (const auto& s : j.at("samples")) {
            SampleEntry e;
            e.index = s.at("index").get<std::size_t>();
            e.byte_offset = s.at("byte_offset").get<std::uint64_t>();
            e.target = s.at("target").get<std::string>();
            e.label = s.at("label").get<int>();
            e.elevation_deg = s.at("elevation_deg").get<double>();
            e.offset_deg = s.at("offset_deg").get<int>();
            e.snr_db = s.at("snr_db").get<double>();
            e.seed = s.at("seed").get<std::uint64_t>();
            e.fold = s.at("fold").get<int>();
            e.azimuths_deg = s.at("azimuths_deg").get<std::vector<double>>();
            m.samples.push_back(std::move(e));
        }
    } catch (const json::exception& ex) {
        fail(std::string("malformed manifest: ") + ex.what());
    }
    return m;
}

std::size_t sample_record_bytes(int radar_count) {
    return kSampleMetaBytes + static_cast<std::size_t>(radar_count) * kPixelsPerChannel * 8 + 4;
}

std::size_t dataset_header_bytes() { return kHeaderBytes; }

std::vector<std::uint8_t> encode_sample(const ImageStack& stack) {
    const int radars = static_cast<int>(stack.channels.size());
    if (radars < 1 || radars > kMaxRadars) fail("stack must hold 1 to 8 channels, got " + std::to_string(radars));
    if (stack.label < 0 || stack.label >= static_cast<int>(kNumClasses)) fail("label out of range");
    if (stack.meta.offset_deg < 0 || stack.meta.offset_deg > 0xffff) fail("offset out of range");
    std::vector<std::uint8_t> out;
    out.reserve(sample_record_bytes(radars));
    out.push_back(static_cast<std::uint8_t>(stack.label));
    put_f32(out, static_cast<float>(stack.meta.elevation_deg));
    put_u16(out, static_cast<std::uint16_t>(stack.meta.offset_deg));
    put_f32(out, static_cast<float>(stack.meta.snr_db));
    put_u64(out, stack.meta.seed);
    for (const auto& ch : stack.channels) {
        if (ch.pixels.rows() != kImageSize || ch.pixels.cols() != kImageSize) fail("channel is not 54x54");
        for (const auto& z : ch.pixels.data()) {
            put_f32(out, static_cast<float>(z.real()));
            put_f32(out, static_cast<float>(z.imag()));
        }
    }
    put_u32(out, crc32_of(out));
    return out;
}

ImageStack decode_sample(std::span<const std::uint8_t> record, int radar_count, std::size_t sample_index) {
    const std::size_t size = sample_record_bytes(radar_count);
    if (record.size() != size) {
        fail("truncated: sample " + std::to_string(sample_index) + " has " + std::to_string(record.size()) +
             " bytes, expected " + std::to_string(size));
    }
    const std::uint32_t stored = get_u32(record.data() + size - 4);
    if (crc32_of(record.first(size - 4)) != stored) {
        fail("checksum mismatch in sample " + std::to_string(sample_index));
    }
    const std::uint8_t* p = record.data();
    ImageStack stack;
    stack.label = p[0];
    if (stack.label >= static_cast<int>(kNumClasses)) fail("label out of range in sample " + std::to_string(sample_index));
    stack.meta.target = std::string(class_table()[static_cast<std::size_t>(stack.label)]);
    stack.meta.elevation_deg = get_f32(p + 1);
    stack.meta.offset_deg = get_u16(p + 5);
    stack.meta.snr_db = get_f32(p + 7);
    stack.meta.seed = get_u64(p + 11);
    p += kSampleMetaBytes;
    for (int k = 0; k < radar_count; ++k) {
        ComplexImage img;
        img.pixels = ComplexMatrix(kImageSize, kImageSize);
        for (auto& z : img.pixels.data()) {
            z = Complex(get_f32(p), get_f32(p + 4));
            p += 8;
        }
        stack.channels.push_back(std::move(img));
    }
    return stack;
}

DatasetWriter::DatasetWriter(fs::path directory, DatasetManifest manifest)
    : directory_(std::move(directory)), manifest_(std::move(manifest)) {
    fs::create_directories(directory_);
    bin_tmp_ = directory_ / "dataset.bin.tmp";
    out_.open(bin_tmp_, std::ios::binary | std::ios::trunc);
    if (!out_) fail("cannot create '" + bin_tmp_.string() + "'");
    const auto header = encode_header(static_cast<std::uint32_t>(manifest_.samples.size()),
                                      static_cast<std::uint32_t>(manifest_.radar_count));
    out_.write(reinterpret_cast<const char*>(header.data()), static_cast<std::streamsize>(header.size()));
}

DatasetWriter::~DatasetWriter() {
    if (!finished_) {
        out_.close();
        std::error_code ec;
        fs::remove(bin_tmp_, ec);
        fs::remove(directory_ / "manifest.json.tmp", ec);
    }
}

void DatasetWriter::append(const ImageStack& stack) {
    if (written_ >= manifest_.samples.size()) fail("more stacks than manifest entries");
    const SampleEntry& entry = manifest_.samples[written_];
    if (static_cast<int>(stack.channels.size()) != manifest_.radar_count) {
        fail("sample " + std::to_string(written_) + " has " + std::to_string(stack.channels.size()) +
             " channels, manifest says " + std::to_string(manifest_.radar_count));
    }
    check_against_manifest(stack, entry);
    const auto bytes = encode_sample(stack);
    out_.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out_) fail("write failed for '" + bin_tmp_.string() + "'");
    ++written_;
}

void DatasetWriter::finish() {
    if (written_ != manifest_.samples.size()) {
        fail("only " + std::to_string(written_) + " of " + std::to_string(manifest_.samples.size()) +
             " samples were written");
    }
    out_.close();
    if (!out_) fail("write failed for '" + bin_tmp_.string() + "'");
    const fs::path manifest_tmp = directory_ / "manifest.json.tmp";
    {
        std::ofstream mf(manifest_tmp, std::ios::binary | std::ios::trunc);
        mf << manifest_to_json(manifest_);
        if (!mf) fail("write failed for '" + manifest_tmp.string() + "'");
    }
    fs::rename(bin_tmp_, directory_ / "dataset.bin");
    fs::rename(manifest_tmp, directory_ / "manifest.json");
    finished_ = true;
}

void write_dataset(const DatasetManifest& manifest, std::span<const ImageStack> stacks, const fs::path& directory) {
    DatasetWriter writer(directory, manifest);
    for (const auto& s : stacks) writer.append(s);
    writer.finish();
}

DatasetReader::DatasetReader(const fs::path& directory) {
    const fs::path manifest_path = directory / "manifest.json";
    std::ifstream mf(manifest_path, std::ios::binary);
    if (!mf) fail("cannot open '" + manifest_path.string() + "'");
    std::stringstream text;
    text << mf.rdbuf();
    manifest_ = manifest_from_json(text.str());

    const fs::path bin = directory / "dataset.bin";
    in_.open(bin, std::ios::binary);
    if (!in_) fail("cannot open '" + bin.string() + "'");
    file_size_ = fs::file_size(bin);

    std::vector<std::uint8_t> header(kHeaderBytes);
    in_.read(reinterpret_cast<char*>(header.data()), static_cast<std::streamsize>(header.size()));
    if (static_cast<std::size_t>(in_.gcount()) != kHeaderBytes) fail("truncated: dataset.bin is shorter than its header");
    if (!std::equal(kDatasetMagic.begin(), kDatasetMagic.end(), header.begin())) fail("bad magic in dataset.bin");
    const std::uint32_t version = get_u32(header.data() + 8);
    if (version != kDatasetVersion) {
        fail("version mismatch: dataset.bin is version " + std::to_string(version) + ", expected " +
             std::to_string(kDatasetVersion));
    }
    const std::uint32_t count = get_u32(header.data() + 12);
    const std::uint32_t radars = get_u32(header.data() + 16);
    const std::uint32_t height = get_u32(header.data() + 20);
    const std::uint32_t width = get_u32(header.data() + 24);
    if (height != kImageSize || width != kImageSize) fail("image size must be 54x54");
    if (radars < 1 || radars > static_cast<std::uint32_t>(kMaxRadars)) fail("radar count out of range in header");
    if (count != manifest_.samples.size()) {
        fail("header declares " + std::to_string(count) + " samples, manifest lists " +
             std::to_string(manifest_.samples.size()));
    }
    if (static_cast<int>(radars) != manifest_.radar_count) fail("radar count differs between header and manifest");
    const std::uint64_t expected = kHeaderBytes + static_cast<std::uint64_t>(count) * sample_record_bytes(static_cast<int>(radars));
    if (file_size_ < expected) {
        fail("truncated: dataset.bin has " + std::to_string(file_size_) + " bytes, expected " + std::to_string(expected));
    }
    if (file_size_ > expected) fail("dataset.bin has trailing bytes after the last sample");
}

ImageStack DatasetReader::read_record(std::size_t index) {
    const SampleEntry& entry = manifest_.samples[index];
    const std::size_t size = sample_record_bytes(manifest_.radar_count);
    if (entry.index != index || entry.byte_offset != kHeaderBytes + index * size) {
        fail("manifest entry " + std::to_string(index) + " has an inconsistent index or byte offset");
    }
    std::vector<std::uint8_t> record(size);
    in_.clear();
    in_.seekg(static_cast<std::streamoff>(entry.byte_offset));
    in_.read(reinterpret_cast<char*>(record.data()), static_cast<std::streamsize>(size));
    if (static_cast<std::size_t>(in_.gcount()) != size) fail("truncated: sample " + std::to_string(index));
    ImageStack stack = decode_sample(record, manifest_.radar_count, index);
    check_against_manifest(stack, entry);
    stack.meta.target = entry.target;
    stack.meta.elevation_deg = entry.elevation_deg;
    stack.meta.snr_db = entry.snr_db;
    stack.meta.azimuths_deg = entry.azimuths_deg;
    for (auto& ch : stack.channels) {
        ch.range_resolution_m = manifest_.waveform.range_resolution_m();
        ch.cross_range_resolution_m = manifest_.waveform.cross_range_resolution_m();
    }
    return stack;
}

std::optional<ImageStack> DatasetReader::next() {
    if (cursor_ >= manifest_.samples.size()) return std::nullopt;
    return read_record(cursor_++);
}

ImageStack DatasetReader::read(std::size_t index) {
    if (index >= manifest_.samples.size()) {
        fail("sample index " + std::to_string(index) + " out of range (" + std::to_string(manifest_.samples.size()) +
             " samples)");
    }
    return read_record(index);
}

LoadedDataset read_dataset(const fs::path& directory) {
    DatasetReader reader(directory);
    LoadedDataset out;
    while (auto s = reader.next()) out.stacks.push_back(std::move(*s));
    out.manifest = reader.manifest();
    return out;
}

DatasetManifest generate_dataset(const DatasetPlan& plan, const SceneMap& scenes, const fs::path& directory,
                                 int workers, const ProgressFn& progress) {
    DatasetManifest manifest = enumerate_dataset(plan);
    for (const auto& t : plan.targets) {
        if (!scenes.contains(t) || !scenes.at(t)) fail("no model loaded for target '" + t + "'");
    }
    const std::size_t levels = plan.noise_levels_db.size();
    const std::size_t jobs = manifest.samples.size() / levels;
    const std::size_t batch = std::max<std::size_t>(16, static_cast<std::size_t>(std::max(workers, 1)) * 4);

    DatasetWriter writer(directory, manifest);
    for (std::size_t start = 0; start < jobs; start += batch) {
        const std::size_t n = std::min(batch, jobs - start);
        std::vector<std::vector<ImageStack>> results(n);
        parallel_for(n, workers, [&](std::size_t i) {
            const SampleEntry& first = manifest.samples[(start + i) * levels];
            std::vector<NoiseSpec> noise;
            for (std::size_t l = 0; l < levels; ++l) {
                const SampleEntry& e = manifest.samples[(start + i) * levels + l];
                noise.push_back({e.snr_db, e.seed});
            }
            RaySpec ray = plan.ray;
            ray.jitter_seed =
                SeedDerivation::jitter_base(plan.master_seed, first.label, first.elevation_deg, first.offset_deg);
            results[i] = generate_stacks(*scenes.at(first.target), first.target, plan.array, first.offset_deg,
                                         first.elevation_deg, noise, plan.waveform, ray);
        });
        for (const auto& group : results) {
            for (const auto& stack : group) writer.append(stack);
        }
        if (progress) progress(start + n, jobs);
    }
    writer.finish();
    return manifest;
}

}  // namespace isar
