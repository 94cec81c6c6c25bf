#pragma once

#include <string>
#include <vector>

#include "vqad/detecteval.hpp"

namespace vqad {

struct ManifestRecord {
    std::string path;  // relative to the manifest's directory
    std::string split; // train | val | test
    std::vector<BoxI> boxes;
};

struct Manifest {
    std::vector<ManifestRecord> records;

    std::vector<const ManifestRecord*> split_records(const std::string& split) const;
};

// Loading validates: parseable JSON, known splits, unique paths, nonnegative
// box geometry, and that train records carry no boxes.
Manifest load_manifest(const std::string& path);
void save_manifest(const Manifest& m, const std::string& path);

struct DetectionRecord {
    std::string image;
    std::vector<DetectionBox> boxes;
};

struct DetectionFile {
    std::vector<DetectionRecord> records;
};

DetectionFile load_detections(const std::string& path);
void save_detections(const DetectionFile& d, const std::string& path);

}  // namespace vqad
