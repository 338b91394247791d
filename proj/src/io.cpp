#include "benign/io.hpp"

#include <fstream>
#include <sstream>
#include <system_error>

#include "benign/errors.hpp"

namespace benign::io {

void write_atomic(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
    namespace fs = std::filesystem;
    fs::path tmp = path;
    tmp += ".tmp";
    const auto discard = [&] {
        std::error_code ignored;
        fs::remove(tmp, ignored);
    };
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        try {
            body(out);
            out.flush();
        } catch (...) {
            out.close();
            discard();
            throw;
        }
        if (!out) {
            out.close();
            discard();
            throw IoError("write to " + tmp.string() + " failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        discard();
        throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace benign::io
