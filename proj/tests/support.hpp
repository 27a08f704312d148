#pragma once

#include <fstream>
#include <sstream>
#include <string>

namespace testsupport {

inline std::string sourceDir() { return SYNTAGM_SOURCE_DIR; }
inline std::string fixtureDir() { return SYNTAGM_FIXTURE_DIR; }
inline std::string kbDir() { return sourceDir() + "/kb"; }

inline std::string readFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string fixture(const std::string& name) { return readFile(fixtureDir() + "/" + name); }

}  // namespace testsupport
