#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace dialectid {

/// Envelope around a trained model's serialized state.
///
/// On disk:
///
///     dialectid-model
///     format_version 1
///     model_kind <kind>
///     hyperparameters <n>
///     <key>=<value>          (n lines, sorted by key)
///     payload_bytes <bytes>
///     checksum crc32:<8 hex digits>
///     <empty line>
///     <payload bytes>
struct ModelContainer {
    static constexpr std::uint32_t kFormatVersion = 1;

    std::uint32_t format_version = kFormatVersion;
    std::string model_kind;
    std::map<std::string, std::string> hyperparameters;
    std::string payload;
};

/// Every model kind a container may carry.
const std::vector<std::string>& known_model_kinds();
bool is_known_model_kind(std::string_view kind);

std::string serialize_model(const ModelContainer& m);
/// Throws ValidationError on an unknown format version or model kind, and
/// ChecksumError when the payload does not match its checksum.
ModelContainer parse_model(std::string_view bytes);

void save_model(const ModelContainer& m, const std::filesystem::path& path);
ModelContainer load_model(const std::filesystem::path& path);

}  // namespace dialectid
