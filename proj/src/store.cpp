#include "soundtex/store.hpp"

#include "soundtex/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace soundtex
{
	namespace
	{
		static_assert(std::numeric_limits<float>::is_iec559);

		class ByteWriter
		{
		public:
			void bytes(const void* data, std::size_t n)
			{
				const auto* p = static_cast<const char*>(data);
				buffer_.insert(buffer_.end(), p, p + n);
			}

			template <class T>
			void little_endian(T value)
			{
				for (std::size_t i = 0; i < sizeof(T); ++i)
				{
					buffer_.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
				}
			}

			const std::vector<char>& buffer() const { return buffer_; }

		private:
			std::vector<char> buffer_;
		};

		class ByteReader
		{
		public:
			ByteReader(const std::vector<char>& data, const std::filesystem::path& path) : data_(data), path_(path) {}

			void require(std::size_t n, const char* what) const
			{
				if (data_.size() - pos_ < n)
				{
					throw CorruptionError(path_.string() + ": truncated while reading " + what);
				}
			}

			template <class T>
			T little_endian(const char* what)
			{
				require(sizeof(T), what);
				T value = 0;
				for (std::size_t i = 0; i < sizeof(T); ++i)
				{
					value |= static_cast<T>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
				}
				pos_ += sizeof(T);
				return value;
			}

			std::string string(std::size_t n, const char* what)
			{
				require(n, what);
				std::string s(data_.data() + pos_, n);
				pos_ += n;
				return s;
			}

			std::size_t remaining() const { return data_.size() - pos_; }

		private:
			const std::vector<char>& data_;
			const std::filesystem::path& path_;
			std::size_t pos_ = 0;
		};

		std::vector<char> slurp(const std::filesystem::path& path)
		{
			std::ifstream in(path, std::ios::binary);
			if (!in)
			{
				throw IoError("cannot open " + path.string());
			}
			return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
		}

		void dump(const std::filesystem::path& path, std::string_view bytes)
		{
			std::ofstream out(path, std::ios::binary | std::ios::trunc);
			if (!out)
			{
				throw IoError("cannot open " + path.string() + " for writing");
			}
			out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
			if (!out)
			{
				throw IoError("failed writing " + path.string());
			}
		}

		std::vector<std::string> split(std::string_view line, char sep)
		{
			std::vector<std::string> fields;
			std::size_t start = 0;
			while (true)
			{
				const std::size_t pos = line.find(sep, start);
				fields.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
				if (pos == std::string_view::npos)
					break;
				start = pos + 1;
			}
			return fields;
		}

		std::string_view trim_cr(std::string_view s)
		{
			if (!s.empty() && s.back() == '\r')
				s.remove_suffix(1);
			return s;
		}

		double parse_double(std::string_view text, double fallback, const std::string& context)
		{
			if (text.empty())
				return fallback;
			try
			{
				std::size_t used = 0;
				const double v = std::stod(std::string(text), &used);
				if (used != text.size() || !std::isfinite(v))
					throw std::invalid_argument("trailing");
				return v;
			}
			catch (const std::exception&)
			{
				throw FormatError(context + ": '" + std::string(text) + "' is not a number");
			}
		}

		template <class T>
		T parse_integer(std::string_view text, const std::string& context)
		{
			T value{};
			const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
			if (ec != std::errc{} || ptr != text.data() + text.size())
			{
				throw FormatError(context + ": '" + std::string(text) + "' is not an integer");
			}
			return value;
		}
	} // namespace

	// ---------------- feature store ----------------

	void write_features(const std::filesystem::path& path, const FeatureSet& fs)
	{
		fs.validate();
		if (fs.dim() > std::numeric_limits<std::uint32_t>::max())
		{
			throw ParameterError("feature dimension " + std::to_string(fs.dim()) + " does not fit the store's u32 field");
		}

		ByteWriter w;
		w.bytes(kFeatureMagic.data(), kFeatureMagic.size());
		w.little_endian(static_cast<std::uint8_t>(fs.kind));
		w.little_endian(static_cast<std::uint32_t>(fs.dim()));
		w.little_endian(static_cast<std::uint64_t>(fs.count()));
		for (const auto& id : fs.clip_ids)
		{
			if (id.size() > std::numeric_limits<std::uint32_t>::max())
			{
				throw ParameterError("clip id too long for the store");
			}
			w.little_endian(static_cast<std::uint32_t>(id.size()));
			w.bytes(id.data(), id.size());
		}
		for (double v : fs.rows.data())
		{
			const auto f = static_cast<float>(v);
			if (!std::isfinite(f))
			{
				throw DataError("feature value " + std::to_string(v) + " overflows float32");
			}
			w.little_endian(std::bit_cast<std::uint32_t>(f));
		}
		dump(path, std::string_view(w.buffer().data(), w.buffer().size()));
	}

	bool is_feature_store(const std::filesystem::path& path)
	{
		std::ifstream in(path, std::ios::binary);
		std::array<char, 8> magic{};
		in.read(magic.data(), magic.size());
		return in && magic == kFeatureMagic;
	}

	FeatureSet read_features(const std::filesystem::path& path)
	{
		const std::vector<char> data = slurp(path);
		if (data.size() < kFeatureMagic.size() ||
			!std::equal(kFeatureMagic.begin(), kFeatureMagic.end(), data.begin()))
		{
			throw FormatError(path.string() + ": bad magic, expected \"SNDTEX01\"");
		}
		ByteReader r(data, path);
		r.string(kFeatureMagic.size(), "magic");
		const auto kind = r.little_endian<std::uint8_t>("feature kind");
		if (kind > 1)
		{
			throw FormatError(path.string() + ": unknown feature kind " + std::to_string(kind));
		}
		const auto dim = r.little_endian<std::uint32_t>("dimension");
		const auto count = r.little_endian<std::uint64_t>("count");

		FeatureSet fs;
		fs.kind = static_cast<FeatureKind>(kind);
		// Each id needs at least its 4-byte length prefix.
		if (count > r.remaining() / 4)
		{
			throw CorruptionError(path.string() + ": count " + std::to_string(count) + " exceeds file size");
		}
		fs.clip_ids.reserve(count);
		for (std::uint64_t i = 0; i < count; ++i)
		{
			const auto len = r.little_endian<std::uint32_t>("clip id length");
			fs.clip_ids.push_back(r.string(len, "clip id"));
		}

		const std::uint64_t payload = count * static_cast<std::uint64_t>(dim) * 4;
		if (dim != 0 && payload / dim / 4 != count)
		{
			throw CorruptionError(path.string() + ": payload size overflows");
		}
		if (r.remaining() < payload)
		{
			throw CorruptionError(path.string() + ": truncated payload, expected " + std::to_string(payload) +
								  " bytes, found " + std::to_string(r.remaining()));
		}
		if (r.remaining() > payload)
		{
			throw CorruptionError(path.string() + ": " + std::to_string(r.remaining() - payload) +
								  " unexpected trailing bytes");
		}
		fs.rows = Matrix(count, dim);
		for (double& v : fs.rows.data())
		{
			v = std::bit_cast<float>(r.little_endian<std::uint32_t>("payload"));
		}
		fs.validate();
		return fs;
	}

	// ---------------- manifest ----------------

	std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path)
	{
		std::ifstream in(path);
		if (!in)
		{
			throw IoError("cannot open manifest " + path.string());
		}
		std::string line;
		if (!std::getline(in, line) || trim_cr(line) != kManifestHeader)
		{
			throw FormatError(path.string() + ": manifest header must be '" + std::string(kManifestHeader) + "'");
		}

		std::vector<ManifestEntry> entries;
		std::set<std::string> seen;
		std::size_t line_no = 1;
		while (std::getline(in, line))
		{
			++line_no;
			const auto text = trim_cr(line);
			if (text.empty())
				continue;
			const std::string where = path.string() + ":" + std::to_string(line_no);
			const auto fields = split(text, ',');
			if (fields.size() != 5)
			{
				throw FormatError(where + ": expected 5 fields, got " + std::to_string(fields.size()));
			}
			ManifestEntry e{fields[0], fields[1], fields[2], parse_double(fields[3], 0.0, where),
							parse_double(fields[4], 3.75, where)};
			if (e.clip_id.empty() || e.audio_path.empty())
			{
				throw FormatError(where + ": clip_id and audio_path must be non-empty");
			}
			if (e.offset_s < 0.0 || !(e.duration_s > 0.0))
			{
				throw FormatError(where + ": offset must be >= 0 and duration > 0");
			}
			if (!seen.insert(e.clip_id).second)
			{
				throw FormatError(where + ": duplicate clip_id '" + e.clip_id + "'");
			}
			entries.push_back(std::move(e));
		}
		return entries;
	}

	void write_manifest(const std::filesystem::path& path, std::span<const ManifestEntry> entries)
	{
		std::ostringstream out;
		out.precision(17);
		out << kManifestHeader << '\n';
		for (const auto& e : entries)
		{
			out << e.clip_id << ',' << e.audio_path << ',' << e.frame_path << ',' << e.offset_s << ',' << e.duration_s
				<< '\n';
		}
		dump(path, out.str());
	}

	// ---------------- labels ----------------

	void write_labels(const std::filesystem::path& path, std::span<const std::string> clip_ids,
					  std::span<const std::string> frame_paths, std::span<const int> labels, const LabelsMeta& meta)
	{
		if (clip_ids.size() != labels.size() || (!frame_paths.empty() && frame_paths.size() != clip_ids.size()))
		{
			throw ParameterError("labels: " + std::to_string(clip_ids.size()) + " clip ids, " +
								 std::to_string(frame_paths.size()) + " frame paths, " + std::to_string(labels.size()) +
								 " labels");
		}
		for (int label : labels)
		{
			if (label < 0 || static_cast<std::size_t>(label) >= meta.k)
			{
				throw ParameterError("label " + std::to_string(label) + " outside [0, " + std::to_string(meta.k) + ")");
			}
		}
		for (const auto& id : clip_ids)
		{
			if (id.find_first_of(",\n\r") != std::string::npos)
			{
				throw ParameterError("clip id '" + id + "' contains a separator character");
			}
		}

		std::vector<std::size_t> order(clip_ids.size());
		std::iota(order.begin(), order.end(), 0);
		std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return clip_ids[a] < clip_ids[b]; });

		std::ostringstream out;
		out << "# k=" << meta.k << ",seed=" << meta.seed << ",feature_kind=" << to_string(meta.kind) << '\n';
		for (std::size_t i : order)
		{
			out << clip_ids[i] << ',' << (frame_paths.empty() ? std::string() : frame_paths[i]) << ',' << labels[i]
				<< '\n';
		}
		dump(path, out.str());
	}

	LabelsFile read_labels(const std::filesystem::path& path)
	{
		std::ifstream in(path);
		if (!in)
		{
			throw IoError("cannot open labels file " + path.string());
		}
		std::string line;
		if (!std::getline(in, line) || !trim_cr(line).starts_with("# "))
		{
			throw FormatError(path.string() + ": labels file must start with a '# k=...' header");
		}

		LabelsFile file;
		bool have_k = false;
		bool have_seed = false;
		bool have_kind = false;
		for (const auto& field : split(trim_cr(line).substr(2), ','))
		{
			const auto eq = field.find('=');
			if (eq == std::string::npos)
				throw FormatError(path.string() + ": malformed header field '" + field + "'");
			const std::string key = field.substr(0, eq);
			const std::string value = field.substr(eq + 1);
			if (key == "k")
			{
				file.meta.k = parse_integer<std::size_t>(value, path.string());
				have_k = true;
			}
			else if (key == "seed")
			{
				file.meta.seed = parse_integer<std::uint64_t>(value, path.string());
				have_seed = true;
			}
			else if (key == "feature_kind")
			{
				file.meta.kind = parse_feature_kind(value);
				have_kind = true;
			}
		}
		if (!have_k || !have_seed || !have_kind)
		{
			throw FormatError(path.string() + ": header needs k, seed and feature_kind");
		}

		std::size_t line_no = 1;
		while (std::getline(in, line))
		{
			++line_no;
			const auto text = trim_cr(line);
			if (text.empty())
				continue;
			const std::string where = path.string() + ":" + std::to_string(line_no);
			const auto first = text.find(',');
			const auto last = text.rfind(',');
			if (first == std::string_view::npos || first == last)
			{
				throw FormatError(where + ": expected clip_id,frame_path,label");
			}
			LabelRecord rec{std::string(text.substr(0, first)), std::string(text.substr(first + 1, last - first - 1)),
							parse_integer<int>(text.substr(last + 1), where)};
			if (rec.label < 0 || static_cast<std::size_t>(rec.label) >= file.meta.k)
			{
				throw FormatError(where + ": label " + std::to_string(rec.label) + " outside [0, k)");
			}
			file.records.push_back(std::move(rec));
		}
		return file;
	}

	// ---------------- model ----------------

	void write_model(const std::filesystem::path& path, const ClusterModel& model)
	{
		nlohmann::ordered_json j;
		j["format"] = "soundtex-kmeans/1";
		j["feature_kind"] = std::string(to_string(model.kind));
		j["k"] = model.k;
		j["dim"] = model.dim();
		j["seed"] = model.seed;
		j["n_iters"] = model.n_iters;
		j["inertia"] = model.inertia;
		auto centroids = nlohmann::ordered_json::array();
		for (std::size_t c = 0; c < model.centroids.rows(); ++c)
		{
			const auto row = model.centroids.row(c);
			centroids.push_back(std::vector<double>(row.begin(), row.end()));
		}
		j["centroids"] = std::move(centroids);
		j["standardizer"] = {{"mean", model.standardizer.mean}, {"scale", model.standardizer.scale}};
		dump(path, j.dump(1) + "\n");
	}

	ClusterModel read_model(const std::filesystem::path& path)
	{
		const auto bytes = slurp(path);
		try
		{
			const auto j = nlohmann::json::parse(bytes.begin(), bytes.end());
			if (j.at("format") != "soundtex-kmeans/1")
			{
				throw FormatError(path.string() + ": unsupported model format");
			}
			ClusterModel m;
			m.kind = parse_feature_kind(j.at("feature_kind").get<std::string>());
			m.k = j.at("k").get<std::size_t>();
			const auto dim = j.at("dim").get<std::size_t>();
			m.seed = j.at("seed").get<std::uint64_t>();
			m.n_iters = j.at("n_iters").get<std::size_t>();
			m.inertia = j.at("inertia").get<double>();
			const auto& centroids = j.at("centroids");
			if (centroids.size() != m.k)
			{
				throw FormatError(path.string() + ": expected " + std::to_string(m.k) + " centroids");
			}
			m.centroids = Matrix(m.k, dim);
			for (std::size_t c = 0; c < m.k; ++c)
			{
				const auto row = centroids.at(c).get<std::vector<double>>();
				if (row.size() != dim)
				{
					throw FormatError(path.string() + ": centroid " + std::to_string(c) + " has wrong dimension");
				}
				std::copy(row.begin(), row.end(), m.centroids.row(c).begin());
			}
			m.standardizer.mean = j.at("standardizer").at("mean").get<std::vector<double>>();
			m.standardizer.scale = j.at("standardizer").at("scale").get<std::vector<double>>();
			if (m.standardizer.mean.size() != dim || m.standardizer.scale.size() != dim)
			{
				throw FormatError(path.string() + ": standardizer has wrong dimension");
			}
			return m;
		}
		catch (const nlohmann::json::exception& e)
		{
			throw FormatError(path.string() + ": " + e.what());
		}
	}
} // namespace soundtex
