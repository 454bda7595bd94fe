#include "vitalradar/scene.hpp"

#include <cmath>
#include <set>

#include "vitalradar/errors.hpp"
#include "vitalradar/kv_file.hpp"

namespace vitalradar {

namespace {

void check(bool ok, const std::string& what) {
    if (!ok) throw InputError(what);
}

std::string tag(const char* kind, std::size_t i) {
    return std::string("scene: ") + kind + " " + std::to_string(i) + ": ";
}

}  // namespace

void Subject::validate(std::size_t index) const {
    const std::string t = tag("subject", index);
    check(range_m > 0, t + "range_m must be positive");
    check(azimuth_deg >= -90 && azimuth_deg <= 90, t + "azimuth_deg must lie in [-90, 90]");
    check(br_per_min >= 3.0 && br_per_min <= 36.0,
          t + "br_per_min must lie in [3, 36]");
    check(hr_per_min >= 48.0 && hr_per_min <= 120.0,
          t + "hr_per_min must lie in [48, 120]");
    check(breath_amp_m > 0 && breath_amp_m <= 20e-3,
          t + "breath_amp_m must lie in (0, 0.02]");
    check(heart_amp_m >= 0 && heart_amp_m <= 2e-3,
          t + "heart_amp_m must lie in [0, 0.002]");
    check(reflectivity > 0, t + "reflectivity must be positive");
    for (double h : breath_harmonics)
        check(h >= 0 && h <= 1.0, t + "breath_harmonics entries must lie in [0, 1]");
}

void ClutterObject::validate(std::size_t index) const {
    const std::string t = tag("clutter", index);
    check(range_m > 0, t + "range_m must be positive");
    check(azimuth_deg >= -90 && azimuth_deg <= 90, t + "azimuth_deg must lie in [-90, 90]");
    check(reflectivity > 0, t + "reflectivity must be positive");
}

void Scene::validate() const {
    for (std::size_t i = 0; i < subjects.size(); ++i) subjects[i].validate(i);
    for (std::size_t i = 0; i < clutter.size(); ++i) clutter[i].validate(i);
    check(std::isinf(snr_db) ? snr_db > 0 : true, "scene: snr_db cannot be -inf");
}

Scene Scene::load(const std::string& path) {
    KvFile kv = KvFile::parse_file(path);
    Scene scene;
    const std::string snr = kv.get_string("snr_db", "inf");
    scene.snr_db = (snr == "inf" || snr == "+inf")
                       ? std::numeric_limits<double>::infinity()
                       : kv.get_double("snr_db");
    scene.seed = kv.has("seed") ? kv.get_u64("seed") : 0;
    scene.path_loss = kv.get_int("path_loss", 0) != 0;

    // collect indices present as subject.<i>.<field>
    auto indices = [&kv](const std::string& prefix) {
        std::set<int> ids;
        for (const std::string& key : kv.keys_with_prefix(prefix)) {
            std::size_t dot = key.find('.', prefix.size());
            if (dot == std::string::npos)
                throw InputError(kv.where(key) + ": expected " + prefix + "<index>.<field>");
            ids.insert(std::stoi(key.substr(prefix.size(), dot - prefix.size())));
        }
        return ids;
    };

    for (int id : indices("subject.")) {
        const std::string p = "subject." + std::to_string(id) + ".";
        Subject s;
        s.range_m = kv.get_double(p + "range_m");
        s.azimuth_deg = kv.get_double(p + "azimuth_deg");
        s.br_per_min = kv.get_double(p + "br_per_min");
        s.hr_per_min = kv.get_double(p + "hr_per_min");
        s.breath_amp_m = kv.get_double(p + "breath_amp_m", s.breath_amp_m);
        s.heart_amp_m = kv.get_double(p + "heart_amp_m", s.heart_amp_m);
        s.breath_phase_rad = kv.get_double(p + "breath_phase_rad", 0.0);
        s.heart_phase_rad = kv.get_double(p + "heart_phase_rad", 0.0);
        s.reflectivity = kv.get_double(p + "reflectivity", 1.0);
        if (kv.has(p + "breath_harmonics"))
            s.breath_harmonics = kv.get_double_list(p + "breath_harmonics");
        scene.subjects.push_back(std::move(s));
    }
    for (int id : indices("clutter.")) {
        const std::string p = "clutter." + std::to_string(id) + ".";
        ClutterObject c;
        c.range_m = kv.get_double(p + "range_m");
        c.azimuth_deg = kv.get_double(p + "azimuth_deg");
        c.reflectivity = kv.get_double(p + "reflectivity", 1.0);
        scene.clutter.push_back(c);
    }
    scene.validate();
    return scene;
}

std::vector<GroundTruthEntry> ground_truth(const Scene& scene, const RadarConfig& config) {
    std::vector<GroundTruthEntry> out;
    const auto& grid = config.azimuth_grid();
    for (std::size_t k = 0; k < scene.subjects.size(); ++k) {
        const Subject& s = scene.subjects[k];
        GroundTruthEntry e;
        e.subject_index = static_cast<int>(k);
        e.range_m = s.range_m;
        e.azimuth_deg = s.azimuth_deg;
        e.range_bin = static_cast<int>(std::lround(s.range_m / config.range_bin_width_m()));
        int best = 0;
        for (std::size_t a = 1; a < grid.size(); ++a)
            if (std::abs(grid[a] - s.azimuth_deg) < std::abs(grid[best] - s.azimuth_deg))
                best = static_cast<int>(a);
        e.azimuth_index = best;
        e.br_per_min = s.br_per_min;
        e.hr_per_min = s.hr_per_min;
        out.push_back(e);
    }
    return out;
}

}  // namespace vitalradar
