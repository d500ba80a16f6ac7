#include "eqf/neural/checkpoint.hpp"

#include "eqf/error.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace eqf::nn {

namespace {

constexpr std::array<char, 8> kMagic{'E', 'Q', 'F', 'C', 'K', 'P', 'T', '1'};

void put_u64(std::ostream& out, std::uint64_t v) {
    std::array<char, 8> b{};
    for (std::size_t i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
    out.write(b.data(), 8);
}

std::uint64_t get_u64(std::istream& in) {
    std::array<unsigned char, 8> b{};
    in.read(reinterpret_cast<char*>(b.data()), 8);
    if (!in) throw Error(Errc::IoError, "truncated checkpoint");
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

nlohmann::json config_json(const TrainConfig& c) {
    return {{"epochs", c.epochs}, {"window", c.window}, {"batch_size", c.batch_size}, {"seed", c.seed}, {"lr", c.lr}};
}

TrainConfig config_from(const nlohmann::json& j) {
    TrainConfig c;
    c.epochs = j.at("epochs").get<std::size_t>();
    c.window = j.at("window").get<std::size_t>();
    c.batch_size = j.at("batch_size").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.lr = j.at("lr").get<double>();
    return c;
}

nlohmann::json shapes_of(Network& net) {
    nlohmann::json shapes = nlohmann::json::array();
    for (const auto& p : net.params()) shapes.push_back(p.value->shape());
    return shapes;
}

void check_shapes(Network& net, const nlohmann::json& shapes) {
    const auto params = net.params();
    if (shapes.size() != params.size()) throw Error(Errc::ShapeMismatch, "checkpoint tensor count");
    for (std::size_t i = 0; i < params.size(); ++i)
        if (shapes[i].get<std::vector<std::size_t>>() != params[i].value->shape())
            throw Error(Errc::ShapeMismatch, "checkpoint tensor shape");
}

}  // namespace

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
    const std::string header = ckpt.header.dump();
    out.write(kMagic.data(), kMagic.size());
    put_u64(out, header.size());
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    put_u64(out, ckpt.parameters.size());
    for (double v : ckpt.parameters) put_u64(out, std::bit_cast<std::uint64_t>(v));
    if (!out) throw Error(Errc::IoError, "write failed " + path.string());
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) throw Error(Errc::IoError, "not a checkpoint: " + path.string());
    const auto header_len = get_u64(in);
    std::string header(header_len, '\0');
    in.read(header.data(), static_cast<std::streamsize>(header_len));
    if (!in) throw Error(Errc::IoError, "truncated checkpoint header");
    Checkpoint ckpt;
    ckpt.header = nlohmann::json::parse(header);
    const auto count = get_u64(in);
    ckpt.parameters.resize(count);
    for (auto& v : ckpt.parameters) v = std::bit_cast<double>(get_u64(in));
    return ckpt;
}

Checkpoint to_checkpoint(LstmWindowModel& model) {
    Checkpoint c;
    c.header = {
        {"model", "lstm_window"},
        {"architecture", model.net.architecture()},
        {"shapes", shapes_of(model.net)},
        {"config", config_json(model.config)},
        {"seed", model.config.seed},
        {"standardizer", {{"mean", model.standardizer.mean}, {"scale", model.standardizer.scale}}},
        {"loss_history", model.loss_history},
    };
    c.parameters = model.net.flat_parameters();
    return c;
}

Checkpoint to_checkpoint(Cnn3dModel& model) {
    Checkpoint c;
    c.header = {
        {"model", "cnn3d"},
        {"architecture", model.net.architecture()},
        {"shapes", shapes_of(model.net)},
        {"config", config_json(model.config)},
        {"seed", model.config.seed},
        {"dims", model.dims},
        {"cnn",
         {{"filters1", model.arch.filters1},
          {"filters2", model.arch.filters2},
          {"dense_units", model.arch.dense_units},
          {"dropout", model.arch.dropout}}},
        {"standardizer", {{"mean", model.standardizer.mean}, {"scale", model.standardizer.scale}}},
        {"loss_history", model.loss_history},
    };
    c.parameters = model.net.flat_parameters();
    return c;
}

LstmWindowModel lstm_from_checkpoint(const Checkpoint& ckpt) {
    if (ckpt.header.value("model", "") != "lstm_window") throw Error(Errc::ShapeMismatch, "not an LSTM checkpoint");
    LstmWindowModel m;
    m.config = config_from(ckpt.header.at("config"));
    m.standardizer.mean = ckpt.header.at("standardizer").at("mean").get<double>();
    m.standardizer.scale = ckpt.header.at("standardizer").at("scale").get<double>();
    m.loss_history = ckpt.header.value("loss_history", std::vector<double>{});
    m.net = Network::from_architecture(ckpt.header.at("architecture"));
    check_shapes(m.net, ckpt.header.at("shapes"));
    m.net.set_flat_parameters(ckpt.parameters);
    return m;
}

Cnn3dModel cnn_from_checkpoint(const Checkpoint& ckpt) {
    if (ckpt.header.value("model", "") != "cnn3d") throw Error(Errc::ShapeMismatch, "not a 3D-CNN checkpoint");
    Cnn3dModel m;
    m.config = config_from(ckpt.header.at("config"));
    m.dims = ckpt.header.at("dims").get<Dims3>();
    const auto& a = ckpt.header.at("cnn");
    m.arch = {a.at("filters1").get<std::size_t>(), a.at("filters2").get<std::size_t>(),
              a.at("dense_units").get<std::size_t>(), a.at("dropout").get<double>()};
    m.standardizer.mean = ckpt.header.at("standardizer").at("mean").get<double>();
    m.standardizer.scale = ckpt.header.at("standardizer").at("scale").get<double>();
    m.loss_history = ckpt.header.value("loss_history", std::vector<double>{});
    m.net = Network::from_architecture(ckpt.header.at("architecture"));
    check_shapes(m.net, ckpt.header.at("shapes"));
    m.net.set_flat_parameters(ckpt.parameters);
    return m;
}

}  // namespace eqf::nn
