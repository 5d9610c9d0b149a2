// Writes the procedural calibration target, the seven surrogate aircraft, and
// a dataset config that references them.
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "isar/dataset.hpp"
#include "isar/error.hpp"
#include "isar/shapes.hpp"

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: isar_models <output-directory>\n";
        return 2;
    }
    const std::filesystem::path dir(argv[1]);
    try {
        std::filesystem::create_directories(dir);
        isar::save_stl_file(isar::shapes::slicy(), (dir / "slicy.stl").string());

        nlohmann::json targets = nlohmann::json::array();
        for (auto name : isar::class_table()) {
            const std::string file = std::string(name) + ".stl";
            isar::save_stl_file(isar::shapes::surrogate_aircraft(std::string(name)), (dir / file).string());
            targets.push_back({{"name", name}, {"model", file}, {"scale", 1.0}});
        }
        const nlohmann::json config = {{"version", 1},
                                       {"targets", targets},
                                       {"radar_count", 4},
                                       {"elevations_deg", {15.0, 30.0}},
                                       {"noise_levels_db", {200.0, 150.0, 100.0}},
                                       {"ground_distance_m", 1000.0},
                                       {"master_seed", 1},
                                       {"ray", {{"rays_per_axis", 64}, {"max_bounces", 3}}}};
        std::ofstream(dir / "dataset.json") << config.dump(2) << "\n";
        std::cout << "wrote models and dataset.json to " << dir.string() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
