#include "idmc/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "idmc/rng.hpp"

namespace idmc {

namespace {

// Dedicated stream ids for dataset generation.
constexpr std::uint64_t kStreamFactorModel = 100;
constexpr std::uint64_t kStreamTrain = 101;
constexpr std::uint64_t kStreamTest = 102;

Eigen::MatrixXd draw_images(const Eigen::MatrixXd& loading, int count, Rng& rng) {
    const Eigen::Index n = loading.rows();
    const Eigen::Index rank = loading.cols();
    Eigen::MatrixXd out(n, count);
    Eigen::VectorXd factors(rank);
    for (int j = 0; j < count; ++j) {
        for (Eigen::Index r = 0; r < rank; ++r) factors(r) = rng.next_normal();
        out.col(j) = loading * factors;
    }
    // Logistic squash to (0, 1).
    out = (1.0 + (-2.0 * out.array()).exp()).inverse();
    return out;
}

}  // namespace

Dataset make_synthetic(int h, int w, int c, int train_count, int test_count,
                       std::uint64_t seed) {
    if (h < 1 || w < 1 || c < 1) throw std::invalid_argument("make_synthetic: bad shape");
    if (train_count < 1 || test_count < 0) {
        throw std::invalid_argument("make_synthetic: bad split sizes");
    }
    Dataset ds;
    ds.h = h;
    ds.w = w;
    ds.c = c;
    const int n = ds.n();
    const int rank = std::max(1, n / 8);

    Rng model_rng(seed, kStreamFactorModel);
    Eigen::MatrixXd loading(n, rank);
    const double scale = 1.0 / std::sqrt(static_cast<double>(rank));
    for (int i = 0; i < n; ++i) {
        for (int r = 0; r < rank; ++r) loading(i, r) = scale * model_rng.next_normal();
    }

    Rng train_rng(seed, kStreamTrain);
    Rng test_rng(seed, kStreamTest);
    ds.train = draw_images(loading, train_count, train_rng);
    ds.test = draw_images(loading, test_count, test_rng);
    return ds;
}

namespace {

int next_pnm_token(std::istream& in) {
    // Whitespace-separated decimal token; '#' starts a comment to end of line.
    for (;;) {
        int ch = in.peek();
        if (ch == '#') {
            std::string line;
            std::getline(in, line);
        } else if (std::isspace(ch)) {
            in.get();
        } else {
            break;
        }
    }
    int value = 0;
    if (!(in >> value)) throw std::runtime_error("read_pnm: malformed header");
    return value;
}

}  // namespace

Eigen::VectorXd read_pnm(const std::filesystem::path& path, int& h, int& w, int& c) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_pnm: cannot open " + path.string());
    char magic[2];
    in.read(magic, 2);
    if (!in || magic[0] != 'P' || (magic[1] != '5' && magic[1] != '6')) {
        throw std::runtime_error("read_pnm: not a binary PGM/PPM file: " + path.string());
    }
    c = magic[1] == '5' ? 1 : 3;
    w = next_pnm_token(in);
    h = next_pnm_token(in);
    const int maxval = next_pnm_token(in);
    if (w < 1 || h < 1 || maxval < 1 || maxval > 255) {
        throw std::runtime_error("read_pnm: unsupported header in " + path.string());
    }
    in.get();  // single whitespace after maxval

    const std::size_t count = static_cast<std::size_t>(h) * static_cast<std::size_t>(w) *
                              static_cast<std::size_t>(c);
    std::vector<unsigned char> raw(count);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(count));
    if (!in) throw std::runtime_error("read_pnm: truncated pixel data in " + path.string());

    Eigen::VectorXd pixels(static_cast<Eigen::Index>(count));
    for (std::size_t i = 0; i < count; ++i) {
        pixels(static_cast<Eigen::Index>(i)) =
            static_cast<double>(raw[i]) / static_cast<double>(maxval);
    }
    return pixels;
}

void write_pnm(const std::filesystem::path& path, const Eigen::VectorXd& pixels, int h,
               int w, int c) {
    if (c != 1 && c != 3) throw std::invalid_argument("write_pnm: channels must be 1 or 3");
    if (pixels.size() != static_cast<Eigen::Index>(h) * w * c) {
        throw std::invalid_argument("write_pnm: pixel count mismatch");
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("write_pnm: cannot open " + path.string());
    out << (c == 1 ? "P5" : "P6") << "\n" << w << " " << h << "\n255\n";
    for (Eigen::Index i = 0; i < pixels.size(); ++i) {
        const double v = std::clamp(pixels(i), 0.0, 1.0);
        out.put(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
    }
    if (!out) throw std::runtime_error("write_pnm: write failed for " + path.string());
}

Dataset load_image_directory(const std::filesystem::path& dir, int train_count,
                             int test_count) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const auto ext = entry.path().extension().string();
        if (entry.is_regular_file() && (ext == ".pgm" || ext == ".ppm")) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    const int needed = train_count + test_count;
    if (static_cast<int>(files.size()) < needed) {
        throw std::runtime_error("load_image_directory: found " +
                                 std::to_string(files.size()) + " images, need " +
                                 std::to_string(needed));
    }

    Dataset ds;
    for (int idx = 0; idx < needed; ++idx) {
        int h = 0, w = 0, c = 0;
        Eigen::VectorXd pixels = read_pnm(files[static_cast<std::size_t>(idx)], h, w, c);
        if (idx == 0) {
            ds.h = h;
            ds.w = w;
            ds.c = c;
            ds.train.resize(ds.n(), train_count);
            ds.test.resize(ds.n(), test_count);
        } else if (h != ds.h || w != ds.w || c != ds.c) {
            throw std::runtime_error("load_image_directory: shape mismatch in " +
                                     files[static_cast<std::size_t>(idx)].string());
        }
        if (idx < train_count) {
            ds.train.col(idx) = pixels;
        } else {
            ds.test.col(idx - train_count) = pixels;
        }
    }
    return ds;
}

}  // namespace idmc
