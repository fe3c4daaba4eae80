#include "bdprof/image_io.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <vector>

namespace bdp {
namespace {

// Scans a header comment for the pixel-size annotation.
void parse_comment(const std::string& text, double* pixel_size, bool* found) {
    std::istringstream in(text);
    std::string key;
    double value = 0.0;
    if (in >> key >> value && key == "pixel_size_um" && value > 0.0) {
        *pixel_size = value;
        *found = true;
    }
}

// Reads one whitespace-delimited header token of a P5/P6 file, consuming
// comments (which run to end of line) along the way.
std::string next_token(std::istream& in, const std::string& path, double* pixel_size,
                       bool* found) {
    for (;;) {
        const int c = in.peek();
        if (c == EOF) throw DataError(path + ": truncated netpbm header");
        if (std::isspace(c)) {
            in.get();
            continue;
        }
        if (c == '#') {
            std::string comment;
            std::getline(in, comment);
            parse_comment(comment.substr(1), pixel_size, found);
            continue;
        }
        std::string token;
        while (in.peek() != EOF && !std::isspace(in.peek())) token.push_back(static_cast<char>(in.get()));
        return token;
    }
}

long parse_long(const std::string& token, const std::string& path, const char* what) {
    try {
        size_t pos = 0;
        const long v = std::stol(token, &pos);
        if (pos != token.size()) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw DataError(path + ": malformed " + what + " in netpbm header");
    }
}

struct RasterHeader {
    int width = 0, height = 0, depth = 0;
    long maxval = 0;
};

RasterHeader read_pam_header(std::istream& in, const std::string& path, double* pixel_size,
                             bool* found) {
    RasterHeader h;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == '#') {
            parse_comment(line.substr(1), pixel_size, found);
            continue;
        }
        std::istringstream fields(line);
        std::string key;
        if (!(fields >> key)) continue;
        if (key == "ENDHDR") return h;
        std::string value;
        fields >> value;
        if (key == "WIDTH") h.width = static_cast<int>(parse_long(value, path, "WIDTH"));
        else if (key == "HEIGHT") h.height = static_cast<int>(parse_long(value, path, "HEIGHT"));
        else if (key == "DEPTH") h.depth = static_cast<int>(parse_long(value, path, "DEPTH"));
        else if (key == "MAXVAL") h.maxval = parse_long(value, path, "MAXVAL");
        // TUPLTYPE and unknown keys are ignored.
    }
    throw DataError(path + ": PAM header has no ENDHDR");
}

}  // namespace

LabeledImage read_image(const std::string& path, const std::map<std::string, int>& roles,
                        WarningList* warnings) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(path + ": cannot open image file");

    std::string magic;
    magic.push_back(static_cast<char>(in.get()));
    magic.push_back(static_cast<char>(in.get()));
    if (!in) throw DataError(path + ": not a netpbm file");
    if (magic == "Pf" || magic == "PF")
        throw DataError(path +
                        ": 32-bit float netpbm containers are not supported; "
                        "re-export as 8- or 16-bit integer PGM/PPM/PAM");

    double pixel_size = 1.0;
    bool pixel_size_found = false;
    RasterHeader h;
    if (magic == "P5" || magic == "P6") {
        h.depth = magic == "P5" ? 1 : 3;
        h.width = static_cast<int>(
            parse_long(next_token(in, path, &pixel_size, &pixel_size_found), path, "width"));
        h.height = static_cast<int>(
            parse_long(next_token(in, path, &pixel_size, &pixel_size_found), path, "height"));
        h.maxval = parse_long(next_token(in, path, &pixel_size, &pixel_size_found), path, "maxval");
        in.get();  // the single whitespace byte before the raster
    } else if (magic == "P7") {
        in.get();  // newline after the magic
        h = read_pam_header(in, path, &pixel_size, &pixel_size_found);
    } else {
        throw DataError(path + ": unsupported netpbm variant '" + magic +
                        "' (binary P5/P6/P7 expected)");
    }

    if (h.width < 1 || h.height < 1) throw DataError(path + ": bad image dimensions");
    if (h.depth < 1 || h.depth > 16) throw DataError(path + ": unsupported channel count");
    if (h.maxval < 1 || h.maxval > 65535) throw DataError(path + ": unsupported maxval");

    const int bytes = h.maxval > 255 ? 2 : 1;
    const size_t total = static_cast<size_t>(h.width) * h.height * h.depth * bytes;
    std::vector<unsigned char> raw(total);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(total));
    if (static_cast<size_t>(in.gcount()) != total) throw DataError(path + ": truncated raster");

    LabeledImage image;
    image.width = h.width;
    image.height = h.height;
    image.bit_depth = bytes == 2 ? 16 : 8;
    image.pixel_size_um = pixel_size;
    image.pixel_size_from_file = pixel_size_found;
    for (int c = 0; c < h.depth; ++c) image.planes.emplace_back(h.width, h.height, 0.0);
    size_t pos = 0;
    for (int y = 0; y < h.height; ++y)
        for (int x = 0; x < h.width; ++x)
            for (int c = 0; c < h.depth; ++c) {
                double v = raw[pos++];
                if (bytes == 2) v = v * 256.0 + raw[pos++];  // big-endian
                image.planes[c].at(x, y) = v;
            }

    for (const auto& [role, index] : roles) {
        if (index < 0 || index >= h.depth)
            throw ConfigError(path + ": role '" + role + "' maps to channel " +
                              std::to_string(index) + " but the file has " +
                              std::to_string(h.depth) + " channel(s)");
        image.roles[role] = index;
    }
    if (!pixel_size_found && warnings)
        add_warning(*warnings,
                    {"pixel_size_missing", path + ": no pixel_size_um annotation, assuming 1.0"});
    return image;
}

void write_image(const std::string& path, const LabeledImage& image) {
    if (image.planes.empty()) throw ConfigError("write_image: no planes");
    const int depth = static_cast<int>(image.planes.size());
    const long maxval = image.bit_depth == 16 ? 65535 : 255;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError(path + ": cannot open for writing");

    char size_comment[64];
    std::snprintf(size_comment, sizeof size_comment, "# pixel_size_um %.12g\n",
                  image.pixel_size_um);
    if (depth == 1 || depth == 3) {
        out << (depth == 1 ? "P5" : "P6") << "\n"
            << size_comment << image.width << " " << image.height << "\n"
            << maxval << "\n";
    } else {
        out << "P7\n"
            << size_comment << "WIDTH " << image.width << "\nHEIGHT " << image.height
            << "\nDEPTH " << depth << "\nMAXVAL " << maxval << "\nENDHDR\n";
    }

    std::vector<unsigned char> raw;
    raw.reserve(static_cast<size_t>(image.width) * image.height * depth * (maxval > 255 ? 2 : 1));
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x)
            for (int c = 0; c < depth; ++c) {
                long v = std::lround(image.planes[c].at(x, y));
                v = std::max(0L, std::min(maxval, v));
                if (maxval > 255) raw.push_back(static_cast<unsigned char>(v >> 8));
                raw.push_back(static_cast<unsigned char>(v & 0xff));
            }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) throw DataError(path + ": write failed");
}

}  // namespace bdp
