#pragma once

#include <string>

#include "vqad/model.hpp"

namespace vqad {

// Checkpoint container: 8-byte magic "VQAD0001", a little-endian uint32
// length prefix, a UTF-8 JSON header carrying the model config and the
// tensor directory (name, shape, element offset), then the float32
// little-endian tensor payloads in directory order.
void save_checkpoint(const std::string& path, const Model& model);

// Throws ArtifactError on a bad magic, malformed header, directory mismatch
// or truncated payload.
Model load_checkpoint(const std::string& path);

}  // namespace vqad
