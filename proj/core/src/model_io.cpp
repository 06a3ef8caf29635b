#include <cstdint>
#include <cstring>
#include <fstream>

#include "evf/errors.hpp"
#include "evf/lstm.hpp"

namespace evf {

namespace {

constexpr char kMagic[8] = {'E', 'V', 'F', 'M', 'O', 'D', 'E', 'L'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_u64(std::ostream& os, std::uint64_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_f64(std::ostream& os, double v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_doubles(std::ostream& os, const Vector& v) {
    os.write(reinterpret_cast<const char*>(v.data()),
             static_cast<std::streamsize>(v.size() * sizeof(double)));
}

std::uint32_t read_u32(std::istream& is) {
    std::uint32_t v;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!is) throw IoError("model file truncated");
    return v;
}
std::uint64_t read_u64(std::istream& is) {
    std::uint64_t v;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!is) throw IoError("model file truncated");
    return v;
}
double read_f64(std::istream& is) {
    double v;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!is) throw IoError("model file truncated");
    return v;
}
void read_doubles(std::istream& is, Vector& v, std::size_t n) {
    v.resize(n);
    is.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    if (!is) throw IoError("model file truncated");
}

}  // namespace

void save_model(const LstmModel& m, const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    os.write(kMagic, sizeof(kMagic));
    write_u32(os, kVersion);
    write_u32(os, static_cast<std::uint32_t>(m.layers.size()));
    for (const auto& p : m.layers) {
        write_u32(os, static_cast<std::uint32_t>(p.input_size));
        write_u32(os, static_cast<std::uint32_t>(p.hidden_size));
        for (const Matrix* w : {&p.W_fx, &p.W_ix, &p.W_ox, &p.W_cx, &p.W_fh, &p.W_ih,
                                &p.W_oh, &p.W_ch})
            write_doubles(os, w->data);
        for (const Vector* b : {&p.b_f, &p.b_i, &p.b_o, &p.b_c}) write_doubles(os, *b);
    }
    write_u32(os, static_cast<std::uint32_t>(m.head_weights.size()));
    write_doubles(os, m.head_weights);
    write_f64(os, m.head_bias);
    write_f64(os, m.dropout_p);
    write_u64(os, m.rng_seed);
    write_u32(os, static_cast<std::uint32_t>(m.norm_stats_id.size()));
    os.write(m.norm_stats_id.data(),
             static_cast<std::streamsize>(m.norm_stats_id.size()));
    if (!os) throw IoError("write to '" + path + "' failed");
}

LstmModel load_model(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open '" + path + "'");
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw IoError("'" + path + "' is not a model file");
    const std::uint32_t version = read_u32(is);
    if (version != kVersion)
        throw IoError("unsupported model file version " + std::to_string(version));

    LstmModel m;
    const std::uint32_t n_layers = read_u32(is);
    if (n_layers == 0 || n_layers > 1024) throw IoError("model file corrupt: layer count");
    for (std::uint32_t l = 0; l < n_layers; ++l) {
        const std::uint32_t in = read_u32(is);
        const std::uint32_t hidden = read_u32(is);
        if (in == 0 || hidden == 0) throw IoError("model file corrupt: layer shape");
        LstmLayerParams p = make_layer(in, hidden);
        for (Matrix* w : {&p.W_fx, &p.W_ix, &p.W_ox, &p.W_cx, &p.W_fh, &p.W_ih, &p.W_oh,
                          &p.W_ch})
            read_doubles(is, w->data, w->rows * w->cols);
        for (Vector* b : {&p.b_f, &p.b_i, &p.b_o, &p.b_c}) read_doubles(is, *b, hidden);
        m.layers.push_back(std::move(p));
    }
    const std::uint32_t head_len = read_u32(is);
    if (head_len != m.layers.back().hidden_size)
        throw IoError("model file corrupt: head size");
    read_doubles(is, m.head_weights, head_len);
    m.head_bias = read_f64(is);
    m.dropout_p = read_f64(is);
    m.rng_seed = read_u64(is);
    const std::uint32_t id_len = read_u32(is);
    if (id_len > 1 << 20) throw IoError("model file corrupt: stats id length");
    m.norm_stats_id.resize(id_len);
    is.read(m.norm_stats_id.data(), id_len);
    if (!is) throw IoError("model file truncated");
    return m;
}

}  // namespace evf
