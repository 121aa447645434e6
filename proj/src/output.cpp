#include "dmdeco/output.hpp"

#include <fstream>
#include <memory>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "dmdeco/decoherence.hpp"
#include "dmdeco/error.hpp"
#include "dmdeco/gravwave.hpp"
#include "dmdeco/random.hpp"

namespace dmdeco
{
std::string git_blob_sha1(std::string_view content)
{
    std::string const header = fmt::format("blob {}", content.size());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(
        EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (!ctx || !EVP_DigestInit_ex(ctx.get(), EVP_sha1(), nullptr)
        || !EVP_DigestUpdate(ctx.get(), header.data(), header.size() + 1)
        || !EVP_DigestUpdate(ctx.get(), content.data(), content.size())
        || !EVP_DigestFinal_ex(ctx.get(), digest, &length))
    {
        throw NumericalError("SHA-1 digest failed");
    }
    std::string hex;
    for (unsigned int i = 0; i < length; ++i)
        hex += fmt::format("{:02x}", digest[i]);
    return hex;
}

nlohmann::ordered_json output_metadata(ExperimentConfig const& config,
                                       std::string_view command,
                                       std::string_view data_file,
                                       std::string_view data)
{
    nlohmann::ordered_json meta;
    meta["tool"] = tool_name;
    meta["version"] = tool_version;
    meta["command"] = command;
    meta["model"] = {{"rate", model_tag},
                     {"phase_convention", phase_convention},
                     {"graviton", graviton_model_tag},
                     {"rng", rng_algorithm}};
    meta["data_file"] = data_file;
    meta["data_git_blob_sha1"] = git_blob_sha1(data);
    meta["config_yaml"] = to_yaml(config);
    return meta;
}

std::filesystem::path metadata_path(std::filesystem::path const& data)
{
    auto p = data;
    p += ".meta.json";
    return p;
}

void write_file(std::filesystem::path const& path, std::string_view bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw InvalidInput(fmt::format("cannot write '{}'", path.string()));
}

std::string read_file(std::filesystem::path const& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InvalidInput(fmt::format("cannot read '{}'", path.string()));
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}
}  // namespace dmdeco
