#include "mvdc/io_formats.hpp"

#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mvdc/error.hpp"

namespace mvdc {

namespace {

class Cursor {
 public:
  explicit Cursor(const std::string& bytes) : s_(bytes) {}

  size_t pos() const { return pos_; }
  bool eof() const { return pos_ >= s_.size(); }

  // Whitespace and '#' comments between header tokens.
  void skip_header_space() {
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (c == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  int read_header_uint(const char* what) {
    skip_header_space();
    size_t start = pos_;
    long v = 0;
    bool any = false;
    while (pos_ < s_.size() &&
           std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      v = v * 10 + (s_[pos_] - '0');
      if (v > 1 << 20) throw ParseError(std::string(what) + " too large", start);
      ++pos_;
      any = true;
    }
    if (!any) throw ParseError(std::string("expected ") + what, pos_);
    return static_cast<int>(v);
  }

  void expect_single_space(const char* what) {
    if (eof() || !std::isspace(static_cast<unsigned char>(s_[pos_]))) {
      throw ParseError(std::string("expected whitespace after ") + what, pos_);
    }
    ++pos_;
  }

  const char* payload(size_t n, const char* what) {
    if (s_.size() - pos_ < n) {
      throw ParseError(std::string("truncated ") + what, s_.size());
    }
    const char* p = s_.data() + pos_;
    pos_ += n;
    return p;
  }

 private:
  const std::string& s_;
  size_t pos_ = 0;
};

void parse_pnm_header(Cursor& cur, char kind, int* w, int* h) {
  if (cur.eof()) throw ParseError("empty file", 0);
  const char* p = cur.payload(2, "magic");
  if (p[0] != 'P' || p[1] != kind) {
    throw ParseError(std::string("expected P") + kind + " magic", 0);
  }
  *w = cur.read_header_uint("width");
  *h = cur.read_header_uint("height");
  if (*w < 1 || *h < 1) throw ParseError("bad dimensions", cur.pos());
  cur.skip_header_space();
  size_t maxval_at = cur.pos();
  int maxval = cur.read_header_uint("maxval");
  if (maxval != 255) throw ParseError("unsupported maxval", maxval_at);
  cur.expect_single_space("maxval");
}

}  // namespace

Grid8 parse_pgm(const std::string& bytes) {
  Cursor cur(bytes);
  int w = 0, h = 0;
  parse_pnm_header(cur, '5', &w, &h);
  size_t n = static_cast<size_t>(w) * h;
  const char* p = cur.payload(n, "pixel data");
  Grid8 img(w, h);
  std::copy(p, p + n, reinterpret_cast<char*>(img.data.data()));
  return img;
}

std::string serialize_pgm(const Grid8& img) {
  std::string out = "P5\n" + std::to_string(img.width) + " " +
                    std::to_string(img.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(img.data.data()), img.size());
  return out;
}

TextureImage parse_ppm(const std::string& bytes) {
  Cursor cur(bytes);
  int w = 0, h = 0;
  parse_pnm_header(cur, '6', &w, &h);
  size_t n = static_cast<size_t>(w) * h * 3;
  const char* p = cur.payload(n, "pixel data");
  TextureImage img(w, h);
  std::copy(p, p + n, reinterpret_cast<char*>(img.data.data()));
  return img;
}

std::string serialize_ppm(const TextureImage& img) {
  std::string out = "P6\n" + std::to_string(img.width) + " " +
                    std::to_string(img.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(img.data.data()),
             img.data.size());
  return out;
}

std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (!in.good() && !in.eof()) throw Error("read failed on " + path);
  return ss.str();
}

void write_file_bytes(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out.good()) throw Error("write failed on " + path);
}

Grid8 read_pgm(const std::string& path) {
  return parse_pgm(read_file_bytes(path));
}

void write_pgm(const std::string& path, const Grid8& img) {
  write_file_bytes(path, serialize_pgm(img));
}

TextureImage read_ppm(const std::string& path) {
  return parse_ppm(read_file_bytes(path));
}

void write_ppm(const std::string& path, const TextureImage& img) {
  write_file_bytes(path, serialize_ppm(img));
}

namespace {

struct Token {
  std::string text;
  size_t offset;
};

std::vector<Token> tokenize_text(const std::string& text) {
  std::vector<Token> toks;
  size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else {
      size_t start = i;
      while (i < text.size() && text[i] != '#' &&
             !std::isspace(static_cast<unsigned char>(text[i]))) {
        ++i;
      }
      toks.push_back({text.substr(start, i - start), start});
    }
  }
  return toks;
}

double token_double(const Token& tok) {
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(tok.text.c_str(), &end);
  if (errno != 0 || end != tok.text.c_str() + tok.text.size()) {
    throw ParseError("bad number '" + tok.text + "'", tok.offset);
  }
  return v;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::vector<CameraParams> parse_cameras(const std::string& text) {
  std::vector<Token> toks = tokenize_text(text);
  if (toks.empty()) throw ParseError("no cameras in file", 0);
  constexpr size_t kPer = 1 + 9 + 9 + 3 + 2;
  if (toks.size() % kPer != 0) {
    throw ParseError("incomplete camera block", toks.back().offset);
  }
  std::vector<CameraParams> cams;
  for (size_t base = 0; base < toks.size(); base += kPer) {
    CameraParams cam;
    cam.id = toks[base].text;
    size_t at = base + 1;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) cam.A[i][j] = token_double(toks[at++]);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) cam.R[i][j] = token_double(toks[at++]);
    for (int i = 0; i < 3; ++i) cam.t[i] = token_double(toks[at++]);
    cam.z_min = token_double(toks[at++]);
    cam.z_max = token_double(toks[at++]);
    validate_camera(cam, 1e-6);
    cams.push_back(std::move(cam));
  }
  return cams;
}

std::string serialize_cameras(const std::vector<CameraParams>& cams) {
  std::string out;
  for (const CameraParams& cam : cams) {
    out += cam.id;
    out += '\n';
    for (int i = 0; i < 3; ++i) {
      out += format_double(cam.A[i][0]) + " " + format_double(cam.A[i][1]) +
             " " + format_double(cam.A[i][2]) + "\n";
    }
    for (int i = 0; i < 3; ++i) {
      out += format_double(cam.R[i][0]) + " " + format_double(cam.R[i][1]) +
             " " + format_double(cam.R[i][2]) + "\n";
    }
    out += format_double(cam.t[0]) + " " + format_double(cam.t[1]) + " " +
           format_double(cam.t[2]) + "\n";
    out += format_double(cam.z_min) + " " + format_double(cam.z_max) + "\n\n";
  }
  return out;
}

std::vector<CameraParams> read_cameras(const std::string& path) {
  return parse_cameras(read_file_bytes(path));
}

void write_cameras(const std::string& path,
                   const std::vector<CameraParams>& cams) {
  write_file_bytes(path, serialize_cameras(cams));
}

}  // namespace mvdc
