#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "isar/geometry.hpp"
#include "isar/imaging.hpp"
#include "isar/noise.hpp"
#include "isar/scattering.hpp"

namespace isar {

inline constexpr std::size_t kNumClasses = 7;
inline constexpr int kMaxRadars = 8;
inline constexpr int kNumFolds = 10;
inline constexpr std::uint32_t kDatasetVersion = 1;
inline constexpr std::array<char, 8> kDatasetMagic{'I', 'S', 'A', 'R', 'D', 'S', '0', '1'};

/// Fixed class order: F15=0, F16=1, J11=2, J15=3, MIG29=4, MIG35=5, EF2000=6.
const std::array<std::string_view, kNumClasses>& class_table();
/// Throws isar::Error for names outside the table.
int class_index(std::string_view name);

struct StackMeta {
    std::string target;
    double elevation_deg = 0.0;
    int offset_deg = 0;
    double snr_db = kNoNoiseSnrDb;
    std::uint64_t seed = 0;
    std::vector<double> azimuths_deg;  // one per channel, radar order
};

/// R co-registered images of one target, one per mono-static radar.
struct ImageStack {
    std::vector<ComplexImage> channels;
    int label = 0;
    StackMeta meta;
};

/// Per-sample seeds. Every value is a splitmix64 chain over the listed fields,
/// so any sample can be regenerated without the others.
struct SeedDerivation {
    static constexpr const char* kDescription =
        "stack_seed = H(master_seed, label, bits(elevation_deg), offset_deg, bits(snr_db)); "
        "channel noise seed = H(stack_seed, radar_index); "
        "ray jitter seed = H(H(master_seed, label, bits(elevation_deg), offset_deg), radar_index); "
        "H = splitmix64 chain, bits = IEEE-754 binary64 pattern";

    static std::uint64_t stack_seed(std::uint64_t master, int label, double elevation_deg, int offset_deg,
                                    double snr_db);
    static std::uint64_t channel_noise_seed(std::uint64_t stack_seed, int radar_index);
    static std::uint64_t jitter_base(std::uint64_t master, int label, double elevation_deg, int offset_deg);
    static std::uint64_t jitter_seed(std::uint64_t master, int label, double elevation_deg, int offset_deg,
                                     int radar_index);
};

/// Builds one stack: trace, add noise, and form an image for each radar of the
/// array placement. `noise.seed` is the stack seed; each channel derives its own.
/// `ray.jitter_seed` is likewise per stack and split per radar.
ImageStack generate_stack(const ScatteringScene& scene, const std::string& target, const ArrayConfig& array,
                          int offset_deg, double elevation_deg, const NoiseSpec& noise, const WaveformSpec& wf,
                          const RaySpec& ray);
ImageStack generate_stack(const TriangleMesh& mesh, const std::string& target, const ArrayConfig& array,
                          int offset_deg, double elevation_deg, const NoiseSpec& noise, const WaveformSpec& wf,
                          const RaySpec& ray);

/// Same placement at several noise levels; tracing happens once per radar.
std::vector<ImageStack> generate_stacks(const ScatteringScene& scene, const std::string& target,
                                        const ArrayConfig& array, int offset_deg, double elevation_deg,
                                        std::span<const NoiseSpec> noise, const WaveformSpec& wf, const RaySpec& ray);

struct SampleEntry {
    std::size_t index = 0;
    std::uint64_t byte_offset = 0;  // start of the record in dataset.bin
    std::string target;
    int label = 0;
    double elevation_deg = 0.0;
    int offset_deg = 0;
    double snr_db = 0.0;
    std::uint64_t seed = 0;
    int fold = 0;
    std::vector<double> azimuths_deg;

    friend bool operator==(const SampleEntry&, const SampleEntry&) = default;
};

struct DatasetManifest {
    std::uint32_t version = kDatasetVersion;
    std::vector<std::string> class_table;
    std::vector<std::string> targets;  // targets present, in enumeration order
    int radar_count = 1;
    std::vector<double> elevations_deg;
    std::vector<double> noise_levels_db;
    double ground_distance_m = 1000.0;
    std::uint64_t master_seed = 0;
    std::string generator = "mt19937_64+box-muller";
    std::string seed_derivation = SeedDerivation::kDescription;
    std::string snr_reference = "mean |sample|^2 over the whole phase history of each channel";
    WaveformSpec waveform;
    RaySpec ray;
    std::vector<SampleEntry> samples;
};

/// What to generate. Noise levels default to the three kept levels; 201 dB
/// (noise-free) and 50 dB are accepted but must be asked for.
struct DatasetPlan {
    std::vector<std::string> targets;
    ArrayConfig array;
    std::vector<double> noise_levels_db{200.0, 150.0, 100.0};
    std::uint64_t master_seed = 0;
    WaveformSpec waveform;
    RaySpec ray;

    void validate() const;
};

/// Full cross product targets x elevations x offsets x noise levels, in that
/// nesting order (noise innermost), with stratified 10-fold assignment: within
/// each (label, noise level) stratum samples are shuffled from the master seed
/// and dealt round-robin into folds.
DatasetManifest enumerate_dataset(const DatasetPlan& plan);

std::string manifest_to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const std::string& text);

/// Size in bytes of one sample record for R channels.
std::size_t sample_record_bytes(int radar_count);
std::size_t dataset_header_bytes();

/// Little-endian record for one stack: label, elevation, offset, snr, seed,
/// R x 54 x 54 complex float pairs, then the CRC32 of everything before it.
std::vector<std::uint8_t> encode_sample(const ImageStack& stack);
/// Inverse of encode_sample. Resolutions are not stored and come back as zero.
ImageStack decode_sample(std::span<const std::uint8_t> record, int radar_count, std::size_t sample_index);

/// Streams stacks into `<dir>/dataset.bin` and `<dir>/manifest.json`. Files are
/// written under temporary names and renamed by finish(); an unfinished writer
/// removes its temporaries.
class DatasetWriter {
public:
    DatasetWriter(std::filesystem::path directory, DatasetManifest manifest);
    ~DatasetWriter();
    DatasetWriter(const DatasetWriter&) = delete;
    DatasetWriter& operator=(const DatasetWriter&) = delete;

    /// Stacks must arrive in manifest order and match their entries.
    void append(const ImageStack& stack);
    void finish();

    std::size_t written() const noexcept { return written_; }

private:
    std::filesystem::path directory_;
    std::filesystem::path bin_tmp_;
    DatasetManifest manifest_;
    std::ofstream out_;
    std::size_t written_ = 0;
    bool finished_ = false;
};

void write_dataset(const DatasetManifest& manifest, std::span<const ImageStack> stacks,
                   const std::filesystem::path& directory);

/// Sequential validated reader. The header is checked on open; each record's
/// checksum and its agreement with the manifest are checked as it is read.
class DatasetReader {
public:
    explicit DatasetReader(const std::filesystem::path& directory);

    const DatasetManifest& manifest() const noexcept { return manifest_; }
    std::optional<ImageStack> next();
    /// Random access by sample index.
    ImageStack read(std::size_t index);

private:
    ImageStack read_record(std::size_t index);

    DatasetManifest manifest_;
    std::ifstream in_;
    std::uint64_t file_size_ = 0;
    std::size_t cursor_ = 0;
};

struct LoadedDataset {
    DatasetManifest manifest;
    std::vector<ImageStack> stacks;
};

LoadedDataset read_dataset(const std::filesystem::path& directory);

/// Targets by class name, each with its prepared scene.
using SceneMap = std::map<std::string, std::shared_ptr<const ScatteringScene>>;

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/// Generates every sample of the plan with `workers` threads and writes the
/// dataset. Output bytes do not depend on the worker count.
DatasetManifest generate_dataset(const DatasetPlan& plan, const SceneMap& scenes,
                                 const std::filesystem::path& directory, int workers,
                                 const ProgressFn& progress = {});

}  // namespace isar
