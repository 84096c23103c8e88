// Copyright 2026 The qsalab Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "manifest.hpp"

#include <array>
#include <fstream>
#include <memory>

#include <openssl/evp.h>

#include "qsalab/dataset_io.hpp"
#include "qsalab/errors.hpp"

#ifndef QSALAB_VERSION
#define QSALAB_VERSION "unknown"
#endif

namespace qsalab::cli {

std::string sha256_file(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigurationError("cannot read '" + path.string() + "' for hashing");
    }
    const std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                                      EVP_MD_CTX_free);
    EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += kHex[digest[i] >> 4];
        out += kHex[digest[i] & 0xF];
    }
    return out;
}

nlohmann::json RunManifest::to_json() const
{
    nlohmann::json in = nlohmann::json::object();
    for (const auto &p : inputs) {
        in[p.generic_string()] = sha256_file(p);
    }
    nlohmann::json out = nlohmann::json::object();
    for (const auto &p : outputs) {
        out[p.generic_string()] = sha256_file(p);
    }
    return {{"tool", "qsalab"},
            {"version", QSALAB_VERSION},
            {"command", command},
            {"arguments", arguments},
            {"config", config},
            {"seed", seed},
            {"inputs", std::move(in)},
            {"outputs", std::move(out)},
            {"wall_seconds", wall_seconds}};
}

void RunManifest::write(const std::filesystem::path &path) const
{
    write_file_atomically(path, to_json().dump(2) + "\n");
}

} // namespace qsalab::cli
