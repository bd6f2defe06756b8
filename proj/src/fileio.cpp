#include "evdet/fileio.hpp"

#include <fstream>
#include <sstream>
#include <system_error>

#include "evdet/error.hpp"

namespace fs = std::filesystem;

namespace evdet {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        throw Error(ErrorKind::Io, "read failed: " + path.string());
    }
    return std::move(buf).str();
}

void write_file_atomic(const fs::path& path, std::string_view bytes) {
    fs::path tmp = path;
    tmp += ".partial";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error(ErrorKind::Io, "cannot create " + tmp.string());
        }
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw Error(ErrorKind::Io, "write failed: " + path.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(ErrorKind::Io, "cannot move output into place: " + path.string());
    }
}

StagedDirectory::StagedDirectory(fs::path target) : target_(std::move(target)) {
    std::error_code ec;
    if (fs::exists(target_, ec) && !(fs::is_directory(target_, ec) && fs::is_empty(target_, ec))) {
        throw Error(ErrorKind::Io, "output directory exists and is not empty: " + target_.string());
    }
    staging_ = target_;
    staging_ += ".partial";
    fs::remove_all(staging_, ec);
    if (!fs::create_directories(staging_, ec) || ec) {
        throw Error(ErrorKind::Io, "cannot create " + staging_.string());
    }
}

StagedDirectory::~StagedDirectory() {
    if (!committed_) {
        std::error_code ec;
        fs::remove_all(staging_, ec);
    }
}

void StagedDirectory::commit() {
    std::error_code ec;
    if (fs::exists(target_, ec)) {
        fs::remove(target_, ec);  // empty by construction
    }
    fs::rename(staging_, target_, ec);
    if (ec) {
        throw Error(ErrorKind::Io, "cannot move output into place: " + target_.string());
    }
    committed_ = true;
}

}  // namespace evdet
