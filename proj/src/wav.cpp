#include "soundtex/wav.hpp"

#include "soundtex/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

namespace soundtex
{
	namespace
	{
		constexpr std::uint16_t kFormatPcm = 1;
		constexpr std::uint16_t kFormatFloat = 3;
		constexpr std::uint16_t kFormatExtensible = 0xFFFE;

		std::uint32_t read_u32(const unsigned char* p)
		{
			return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
				   (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
		}

		std::uint16_t read_u16(const unsigned char* p)
		{
			return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
		}

		double decode_sample(const unsigned char* p, std::uint16_t format, std::uint16_t bits)
		{
			if (format == kFormatFloat)
			{
				if (bits == 32)
					return std::bit_cast<float>(read_u32(p));
				std::uint64_t raw = 0;
				for (int i = 0; i < 8; ++i)
					raw |= static_cast<std::uint64_t>(p[i]) << (8 * i);
				return std::bit_cast<double>(raw);
			}
			switch (bits)
			{
			case 8:
				return (static_cast<double>(p[0]) - 128.0) / 128.0;
			case 16:
				return static_cast<std::int16_t>(read_u16(p)) / 32768.0;
			case 24:
			{
				std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
				if (v & 0x800000)
					v -= 0x1000000;
				return v / 8388608.0;
			}
			case 32:
				return static_cast<std::int32_t>(read_u32(p)) / 2147483648.0;
			}
			return 0.0;
		}

		void put_u16(std::vector<char>& out, std::uint16_t v)
		{
			out.push_back(static_cast<char>(v & 0xFF));
			out.push_back(static_cast<char>(v >> 8));
		}

		void put_u32(std::vector<char>& out, std::uint32_t v)
		{
			for (int i = 0; i < 4; ++i)
				out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
		}
	} // namespace

	Waveform read_wav(const std::filesystem::path& path)
	{
		std::ifstream in(path, std::ios::binary);
		if (!in)
		{
			throw IoError("cannot open " + path.string());
		}
		const std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
		const std::string name = path.string();
		if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
		{
			throw FormatError(name + ": not a RIFF/WAVE file");
		}

		std::uint16_t format = 0;
		std::uint16_t channels = 0;
		std::uint32_t sample_rate = 0;
		std::uint16_t bits = 0;
		const unsigned char* data = nullptr;
		std::size_t data_size = 0;

		std::size_t pos = 12;
		while (pos + 8 <= bytes.size())
		{
			const unsigned char* chunk = bytes.data() + pos;
			const std::uint32_t size = read_u32(chunk + 4);
			const std::size_t body = pos + 8;
			const std::size_t available = bytes.size() - body;
			if (std::memcmp(chunk, "fmt ", 4) == 0)
			{
				if (size < 16 || available < 16)
					throw FormatError(name + ": fmt chunk too short");
				format = read_u16(chunk + 8);
				channels = read_u16(chunk + 10);
				sample_rate = read_u32(chunk + 12);
				bits = read_u16(chunk + 22);
				if (format == kFormatExtensible)
				{
					if (size < 40 || available < 40)
						throw FormatError(name + ": extensible fmt chunk too short");
					// First two bytes of the sub-format GUID carry the format tag.
					format = read_u16(chunk + 8 + 24);
				}
			}
			else if (std::memcmp(chunk, "data", 4) == 0)
			{
				data = chunk + 8;
				// Streaming writers sometimes leave the size unset; take what is there.
				data_size = std::min<std::size_t>(size, available);
			}
			pos = body + size + (size & 1);
		}

		if (channels == 0 || sample_rate == 0)
			throw FormatError(name + ": missing or invalid fmt chunk");
		if (data == nullptr)
			throw FormatError(name + ": missing data chunk");
		const bool supported = (format == kFormatPcm && (bits == 8 || bits == 16 || bits == 24 || bits == 32)) ||
							   (format == kFormatFloat && (bits == 32 || bits == 64));
		if (!supported)
		{
			throw FormatError(name + ": unsupported encoding (format " + std::to_string(format) + ", " +
							  std::to_string(bits) + " bits)");
		}

		const std::size_t frame_bytes = static_cast<std::size_t>(channels) * (bits / 8);
		const std::size_t frames = data_size / frame_bytes;
		if (frames == 0)
			throw FormatError(name + ": no audio frames");

		std::vector<double> samples(frames);
		for (std::size_t f = 0; f < frames; ++f)
		{
			double sum = 0.0;
			for (std::size_t c = 0; c < channels; ++c)
			{
				sum += decode_sample(data + f * frame_bytes + c * (bits / 8), format, bits);
			}
			samples[f] = sum / channels;
		}
		return Waveform(std::move(samples), static_cast<int>(sample_rate));
	}

	void write_wav(const std::filesystem::path& path, const Waveform& w, WavEncoding encoding)
	{
		const std::uint16_t bits = encoding == WavEncoding::Pcm16 ? 16 : encoding == WavEncoding::Pcm24 ? 24 : 32;
		const std::uint16_t format = encoding == WavEncoding::Float32 ? kFormatFloat : kFormatPcm;
		const std::uint32_t data_size = static_cast<std::uint32_t>(w.size() * (bits / 8));

		std::vector<char> out;
		out.reserve(44 + data_size);
		out.insert(out.end(), {'R', 'I', 'F', 'F'});
		put_u32(out, 36 + data_size);
		out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
		put_u32(out, 16);
		put_u16(out, format);
		put_u16(out, 1);
		put_u32(out, static_cast<std::uint32_t>(w.sample_rate()));
		put_u32(out, static_cast<std::uint32_t>(w.sample_rate()) * (bits / 8));
		put_u16(out, bits / 8);
		put_u16(out, bits);
		out.insert(out.end(), {'d', 'a', 't', 'a'});
		put_u32(out, data_size);

		for (double s : w.samples())
		{
			switch (encoding)
			{
			case WavEncoding::Pcm16:
			{
				const auto v = static_cast<std::int16_t>(std::clamp<long>(std::lround(std::clamp(s, -2.0, 2.0) * 32768.0), -32768, 32767));
				put_u16(out, static_cast<std::uint16_t>(v));
				break;
			}
			case WavEncoding::Pcm24:
			{
				const auto v = static_cast<std::int32_t>(std::clamp<long>(std::lround(std::clamp(s, -2.0, 2.0) * 8388608.0), -8388608, 8388607));
				for (int i = 0; i < 3; ++i)
					out.push_back(static_cast<char>((static_cast<std::uint32_t>(v) >> (8 * i)) & 0xFF));
				break;
			}
			case WavEncoding::Float32:
				put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(s)));
				break;
			}
		}

		std::ofstream file(path, std::ios::binary | std::ios::trunc);
		if (!file)
		{
			throw IoError("cannot open " + path.string() + " for writing");
		}
		file.write(out.data(), static_cast<std::streamsize>(out.size()));
		if (!file)
		{
			throw IoError("failed writing " + path.string());
		}
	}
} // namespace soundtex
