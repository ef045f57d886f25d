#include "lungpipe/imgio.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "csv_util.hpp"
#include "lungpipe/errors.hpp"

namespace lungpipe {

double dice_coefficient(const BinaryMask& a, const BinaryMask& b) {
    if (a.width != b.width || a.height != b.height)
        throw argument_error("dice_coefficient: mask dimensions differ");
    std::size_t inter = 0, total = 0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i) {
        const bool pa = a.pixels[i] != 0, pb = b.pixels[i] != 0;
        inter += (pa && pb);
        total += pa + pb;
    }
    if (total == 0)
        return 1.0;
    return 2.0 * static_cast<double>(inter) / static_cast<double>(total);
}

namespace {

// Reads the next whitespace-delimited header token, skipping '#' comments.
std::string next_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (std::isspace(c))
            continue;
        tok.push_back(static_cast<char>(c));
        while ((c = in.peek()) != EOF && !std::isspace(c) && c != '#')
            tok.push_back(static_cast<char>(in.get()));
        return tok;
    }
    return tok;
}

int parse_header_int(const std::string& tok, const char* what) {
    if (tok.empty())
        throw format_error(std::string("PGM header: missing ") + what);
    for (char ch : tok)
        if (!std::isdigit(static_cast<unsigned char>(ch)))
            throw format_error(std::string("PGM header: non-numeric ") + what + " '" + tok + "'");
    long v = std::strtol(tok.c_str(), nullptr, 10);
    return static_cast<int>(v);
}

} // namespace

GrayImage load_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("cannot open '" + path + "' for reading");

    const std::string magic = next_token(in);
    if (magic != "P2" && magic != "P5")
        throw format_error("'" + path + "': not a P2/P5 PGM (magic '" + magic + "')");

    const int w = parse_header_int(next_token(in), "width");
    const int h = parse_header_int(next_token(in), "height");
    const int maxval = parse_header_int(next_token(in), "maxval");
    if (w < 1 || h < 1)
        throw format_error("'" + path + "': bad dimensions");
    if (maxval < 1 || maxval > 65535)
        throw format_error("'" + path + "': maxval out of range [1, 65535]");

    GrayImage img(w, h);
    const std::size_t n = img.size();

    if (magic == "P2") {
        for (std::size_t i = 0; i < n; ++i) {
            const std::string tok = next_token(in);
            if (tok.empty())
                throw io_error("'" + path + "': truncated ASCII payload");
            const int v = parse_header_int(tok, "sample");
            if (v > maxval)
                throw format_error("'" + path + "': sample exceeds maxval");
            img.pixels[i] = static_cast<std::uint16_t>(v);
        }
    } else {
        // exactly one whitespace byte separates the header from the payload
        const int sep = in.get();
        if (sep == EOF || !std::isspace(sep))
            throw format_error("'" + path + "': missing whitespace after maxval");
        const std::size_t bytes_per = maxval > 255 ? 2 : 1;
        std::vector<unsigned char> buf(n * bytes_per);
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (static_cast<std::size_t>(in.gcount()) != buf.size())
            throw io_error("'" + path + "': truncated binary payload");
        if (bytes_per == 1) {
            for (std::size_t i = 0; i < n; ++i)
                img.pixels[i] = buf[i];
        } else {
            for (std::size_t i = 0; i < n; ++i)
                img.pixels[i] = static_cast<std::uint16_t>((buf[2 * i] << 8) | buf[2 * i + 1]);
        }
    }
    return img;
}

void save_image(const GrayImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw io_error("cannot open '" + path + "' for writing");
    out << "P5\n" << img.width << ' ' << img.height << "\n65535\n";
    std::vector<unsigned char> buf;
    buf.reserve(img.size() * 2);
    for (std::uint16_t v : img.pixels) {
        buf.push_back(static_cast<unsigned char>(v >> 8));
        buf.push_back(static_cast<unsigned char>(v & 0xFF));
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out)
        throw io_error("write failed for '" + path + "'");
}

void save_mask(const BinaryMask& mask, const std::string& path) {
    GrayImage img(mask.width, mask.height);
    for (std::size_t i = 0; i < mask.pixels.size(); ++i)
        img.pixels[i] = mask.pixels[i] ? 65535 : 0;
    save_image(img, path);
}

BinaryMask load_mask(const std::string& path) {
    const GrayImage img = load_image(path);
    BinaryMask mask(img.width, img.height);
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        mask.pixels[i] = img.pixels[i] != 0;
    return mask;
}

std::string to_string(Split s) { return s == Split::train ? "train" : "test"; }

std::size_t DatasetManifest::count(Split s) const {
    std::size_t n = 0;
    for (const auto& e : entries)
        n += (e.split == s);
    return n;
}

DatasetManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot open manifest '" + path + "'");

    std::string line;
    if (!std::getline(in, line))
        throw format_error("manifest '" + path + "' is empty");
    {
        auto header = detail::split_csv_line(line);
        if (header.size() != 3 || header[0] != "path" || header[1] != "label" || header[2] != "split")
            throw format_error("manifest '" + path + "': expected header 'path,label,split'");
    }

    DatasetManifest manifest;
    std::vector<std::string> seen;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r")
            continue;
        auto fields = detail::split_csv_line(line);
        if (fields.size() != 3)
            throw format_error("manifest '" + path + "': malformed row '" + line + "'");
        ManifestEntry e;
        e.path = fields[0];
        if (fields[1] == "0")
            e.label = 0;
        else if (fields[1] == "1")
            e.label = 1;
        else
            throw format_error("manifest '" + path + "': label must be 0 or 1, got '" + fields[1] + "'");
        if (fields[2] == "train")
            e.split = Split::train;
        else if (fields[2] == "test")
            e.split = Split::test;
        else
            throw format_error("manifest '" + path + "': unknown split tag '" + fields[2] + "'");
        for (const auto& s : seen)
            if (s == e.path)
                throw format_error("manifest '" + path + "': duplicate path '" + e.path + "'");
        seen.push_back(e.path);
        manifest.entries.push_back(std::move(e));
    }
    return manifest;
}

void save_manifest(const DatasetManifest& manifest, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw io_error("cannot open manifest '" + path + "' for writing");
    out << "path,label,split\n";
    for (const auto& e : manifest.entries)
        out << e.path << ',' << e.label << ',' << to_string(e.split) << '\n';
    if (!out)
        throw io_error("write failed for manifest '" + path + "'");
}

} // namespace lungpipe
