#include "vqad/manifest.hpp"

#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "vqad/errors.hpp"

namespace vqad {

using nlohmann::json;

namespace {

json load_json_file(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw IoError(std::string("cannot open ") + what + ": " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw DataError(std::string("invalid ") + what + " " + path + ": " + e.what());
    }
}

void write_json_file(const json& j, const std::string& path, const char* what) {
    std::ofstream out(path);
    if (!out) throw IoError(std::string("cannot write ") + what + ": " + path);
    out << j.dump(2) << '\n';
    if (!out) throw IoError(std::string("failed writing ") + what + ": " + path);
}

}  // namespace

std::vector<const ManifestRecord*> Manifest::split_records(const std::string& split) const {
    std::vector<const ManifestRecord*> out;
    for (const auto& r : records)
        if (r.split == split) out.push_back(&r);
    return out;
}

Manifest load_manifest(const std::string& path) {
    const json j = load_json_file(path, "manifest");
    Manifest m;
    try {
        std::unordered_set<std::string> seen;
        for (const auto& jr : j.at("records")) {
            ManifestRecord r;
            r.path = jr.at("path").get<std::string>();
            r.split = jr.at("split").get<std::string>();
            if (r.split != "train" && r.split != "val" && r.split != "test")
                throw DataError("manifest " + path + ": unknown split '" + r.split + "'");
            if (!seen.insert(r.path).second)
                throw DataError("manifest " + path + ": duplicate path '" + r.path + "'");
            for (const auto& jb : jr.value("boxes", json::array())) {
                BoxI b{jb.at("x").get<int>(), jb.at("y").get<int>(), jb.at("w").get<int>(),
                       jb.at("h").get<int>()};
                if (b.x < 0 || b.y < 0 || b.w < 1 || b.h < 1)
                    throw DataError("manifest " + path + ": invalid box geometry");
                r.boxes.push_back(b);
            }
            if (r.split == "train" && !r.boxes.empty())
                throw DataError("manifest " + path + ": train record '" + r.path +
                                "' carries boxes");
            m.records.push_back(std::move(r));
        }
    } catch (const json::exception& e) {
        throw DataError("manifest " + path + ": " + e.what());
    }
    return m;
}

void save_manifest(const Manifest& m, const std::string& path) {
    json records = json::array();
    for (const auto& r : m.records) {
        json boxes = json::array();
        for (const auto& b : r.boxes)
            boxes.push_back({{"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}});
        records.push_back({{"path", r.path}, {"split", r.split}, {"boxes", boxes}});
    }
    write_json_file(json{{"records", records}}, path, "manifest");
}

DetectionFile load_detections(const std::string& path) {
    const json j = load_json_file(path, "detections file");
    DetectionFile d;
    try {
        for (const auto& jr : j.at("detections")) {
            DetectionRecord r;
            r.image = jr.at("image").get<std::string>();
            for (const auto& jb : jr.value("boxes", json::array()))
                r.boxes.push_back({jb.at("x").get<int>(), jb.at("y").get<int>(),
                                   jb.at("w").get<int>(), jb.at("h").get<int>(),
                                   jb.at("score").get<float>()});
            d.records.push_back(std::move(r));
        }
    } catch (const json::exception& e) {
        throw DataError("detections file " + path + ": " + e.what());
    }
    return d;
}

void save_detections(const DetectionFile& d, const std::string& path) {
    json records = json::array();
    for (const auto& r : d.records) {
        json boxes = json::array();
        for (const auto& b : r.boxes)
            boxes.push_back(
                {{"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}, {"score", b.score}});
        records.push_back({{"image", r.image}, {"boxes", boxes}});
    }
    write_json_file(json{{"detections", records}}, path, "detections file");
}

}  // namespace vqad
