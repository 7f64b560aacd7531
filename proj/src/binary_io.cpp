#include "mongemmd/binary_io.hpp"

#include "mongemmd/error.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

namespace mongemmd::io {

static_assert(std::endian::native == std::endian::little,
              "binary checkpoints assume a little-endian host");

namespace {

template <typename T>
void put(std::ostream& os, T v)
{
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    os.write(buf, sizeof(T));
}

template <typename T>
T get(std::istream& is)
{
    char buf[sizeof(T)];
    if (!is.read(buf, sizeof(T)))
        throw InputError("binary input truncated");
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
}

} // namespace

void write_u8(std::ostream& os, std::uint8_t v) { put(os, v); }
void write_u32(std::ostream& os, std::uint32_t v) { put(os, v); }
void write_u64(std::ostream& os, std::uint64_t v) { put(os, v); }
void write_f64(std::ostream& os, double v) { put(os, v); }

std::uint8_t read_u8(std::istream& is) { return get<std::uint8_t>(is); }
std::uint32_t read_u32(std::istream& is) { return get<std::uint32_t>(is); }
std::uint64_t read_u64(std::istream& is) { return get<std::uint64_t>(is); }
double read_f64(std::istream& is) { return get<double>(is); }

std::uint64_t fnv1a64(const std::string& bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void atomic_write(const std::filesystem::path& path, const std::string& contents)
{
    namespace fs = std::filesystem;
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec)
            throw InputError("cannot create directory " + path.parent_path().string() + ": " +
                             ec.message());
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw InputError("cannot open " + tmp.string() + " for writing");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out)
            throw InputError("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw InputError("cannot rename into " + path.string());
    }
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace mongemmd::io
