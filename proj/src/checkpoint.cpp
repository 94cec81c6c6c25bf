#include "vqad/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "vqad/errors.hpp"
#include "vqad/serde.hpp"

namespace vqad {

static_assert(std::endian::native == std::endian::little,
              "checkpoint payload assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'V', 'Q', 'A', 'D', '0', '0', '0', '1'};
constexpr std::uint32_t kMaxHeader = 16u << 20;

}  // namespace

void save_checkpoint(const std::string& path, const Model& model) {
    nlohmann::json tensors = nlohmann::json::array();
    for (const TensorInfo& t : model.directory())
        tensors.push_back({{"name", t.name}, {"shape", t.shape}, {"offset", t.offset}});
    const std::string header =
        nlohmann::json{{"config", model.config()}, {"tensors", tensors}}.dump();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write checkpoint: " + path);
    out.write(kMagic, sizeof(kMagic));
    const std::uint32_t len = static_cast<std::uint32_t>(header.size());
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    out.write(reinterpret_cast<const char*>(model.params().data()),
              static_cast<std::streamsize>(model.params().size() * sizeof(float)));
    if (!out) throw IoError("failed writing checkpoint: " + path);
}

Model load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint: " + path);

    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw ArtifactError("not a checkpoint (bad magic): " + path);

    std::uint32_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof(len));
    if (!in || len == 0 || len > kMaxHeader)
        throw ArtifactError("corrupt checkpoint header length: " + path);

    std::string header(len, '\0');
    in.read(header.data(), len);
    if (!in) throw ArtifactError("truncated checkpoint header: " + path);

    nlohmann::json j;
    ModelConfig cfg;
    try {
        j = nlohmann::json::parse(header);
        cfg = j.at("config").get<ModelConfig>();
        validate_config(cfg);
    } catch (const nlohmann::json::exception& e) {
        throw ArtifactError("corrupt checkpoint header " + path + ": " + e.what());
    } catch (const ConfigError& e) {
        throw ArtifactError("checkpoint config invalid " + path + ": " + e.what());
    }

    Model model(cfg);
    try {
        const auto& tensors = j.at("tensors");
        const auto& dir = model.directory();
        if (tensors.size() != dir.size())
            throw ArtifactError("checkpoint tensor directory mismatch: " + path);
        for (std::size_t i = 0; i < dir.size(); ++i) {
            if (tensors[i].at("name").get<std::string>() != dir[i].name ||
                tensors[i].at("shape").get<std::vector<int>>() != dir[i].shape ||
                tensors[i].at("offset").get<std::size_t>() != dir[i].offset)
                throw ArtifactError("checkpoint tensor directory mismatch: " + path);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ArtifactError("corrupt checkpoint directory " + path + ": " + e.what());
    }

    in.read(reinterpret_cast<char*>(model.params().data()),
            static_cast<std::streamsize>(model.params().size() * sizeof(float)));
    if (in.gcount() !=
        static_cast<std::streamsize>(model.params().size() * sizeof(float)))
        throw ArtifactError("truncated checkpoint payload: " + path);
    return model;
}

}  // namespace vqad
