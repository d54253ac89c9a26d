#include "output_stage.hpp"

#include "cascade_branch/error.hpp"

#include <atomic>
#include <fstream>
#include <memory>

#include <fmt/format.h>
#include <openssl/evp.h>
#include <unistd.h>

namespace cascade_branch::cli {

namespace fs = std::filesystem;

namespace {

fs::path unique_sibling(const fs::path& target, const char* tag)
{
    static std::atomic<unsigned> counter{0};
    const auto parent = target.has_parent_path() ? target.parent_path() : fs::path(".");
    return parent / fmt::format(".{}.{}-{}-{}", target.filename().string(), tag, ::getpid(), counter++);
}

void write_raw(const fs::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(ErrorKind::Io, "cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out)
        throw Error(ErrorKind::Io, "write failed for " + path.string());
}

} // namespace

OutputStage::OutputStage(fs::path target_dir) : target_(std::move(target_dir))
{
    stage_ = unique_sibling(target_, "partial");
    std::error_code ec;
    fs::create_directories(stage_, ec);
    if (ec)
        throw Error(ErrorKind::Io, fmt::format("cannot create staging directory {}: {}", stage_.string(), ec.message()));
}

OutputStage::~OutputStage()
{
    std::error_code ec;
    fs::remove_all(stage_, ec);
}

void OutputStage::write(const std::string& name, const std::string& content)
{
    write_raw(stage_ / name, content);
    files_.push_back(name);
}

void OutputStage::commit()
{
    std::error_code ec;
    fs::create_directories(target_, ec);
    if (ec)
        throw Error(ErrorKind::Io, fmt::format("cannot create {}: {}", target_.string(), ec.message()));
    for (const auto& name : files_) {
        fs::rename(stage_ / name, target_ / name, ec);
        if (ec)
            throw Error(ErrorKind::Io, fmt::format("cannot move {} into place: {}", name, ec.message()));
    }
    committed_ = true;
}

void write_file_atomically(const fs::path& target, const std::string& content)
{
    const auto tmp = unique_sibling(target, "tmp");
    try {
        write_raw(tmp, content);
        fs::rename(tmp, target);
    } catch (...) {
        std::error_code ec;
        fs::remove(tmp, ec);
        throw;
    }
}

std::string sha256_hex(const std::string& data)
{
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
        throw Error(ErrorKind::Io, "sha256 failed");
    std::string hex;
    hex.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i)
        hex += fmt::format("{:02x}", digest[i]);
    return hex;
}

} // namespace cascade_branch::cli
