#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

#include <json.hpp>

#include "lexsimp/providers.hpp"

namespace testing {

inline std::filesystem::path data_dir() { return LEXSIMP_TEST_DATA_DIR; }

inline std::string data_path(const std::string& name) { return (data_dir() / name).string(); }

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Scripted provider from an inline JSON script.
inline lexsimp::providers::ScriptedProvider scripted(const nlohmann::ordered_json& script,
                                                     const std::string& id = "test") {
    lexsimp::providers::ProviderConfig c;
    c.kind = lexsimp::providers::ProviderKind::scripted;
    c.id = id;
    c.script = lexsimp::providers::parse_script(script);
    return lexsimp::providers::ScriptedProvider(c);
}

/// Fresh scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("lexsimp-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

} // namespace testing
