#include "relock/bench.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace relock {

namespace {

bool is_name_char(char c)
{
	return !std::isspace(static_cast<unsigned char>(c)) && c != '(' && c != ')' && c != ',' && c != '=' &&
	       c != '#';
}

struct Statement {
	enum class Kind { Input, Output, Gate } kind;
	size_t line;
	std::string target;
	std::string gate_name;
	std::vector<std::string> operands;
};

class LineScanner {
      public:
	LineScanner(std::string_view text, size_t line) : text_(text), line_(line) {}

	void skip_ws()
	{
		while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
			++pos_;
	}

	bool at_end()
	{
		skip_ws();
		return pos_ >= text_.size();
	}

	char peek()
	{
		skip_ws();
		return pos_ < text_.size() ? text_[pos_] : '\0';
	}

	void expect(char c)
	{
		if (peek() != c)
			throw ParseError(line_, std::string("expected '") + c + "'");
		++pos_;
	}

	std::string name(const char *what)
	{
		skip_ws();
		size_t start = pos_;
		while (pos_ < text_.size() && is_name_char(text_[pos_]))
			++pos_;
		if (pos_ == start)
			throw ParseError(line_, std::string("expected ") + what);
		return std::string(text_.substr(start, pos_ - start));
	}

      private:
	std::string_view text_;
	size_t line_;
	size_t pos_ = 0;
};

bool iequals(std::string_view a, std::string_view b)
{
	if (a.size() != b.size())
		return false;
	for (size_t i = 0; i < a.size(); ++i)
		if (std::toupper(static_cast<unsigned char>(a[i])) != std::toupper(static_cast<unsigned char>(b[i])))
			return false;
	return true;
}

bool is_sequential_name(std::string_view s)
{
	return iequals(s, "DFF") || iequals(s, "SDFF") || iequals(s, "DFFSR") || iequals(s, "LATCH");
}

} // namespace

Circuit parse_bench(std::string_view text)
{
	std::vector<Statement> statements;
	size_t line_no = 0;
	size_t pos = 0;
	while (pos <= text.size()) {
		size_t eol = text.find('\n', pos);
		std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos
										       : eol - pos);
		pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
		++line_no;
		if (!line.empty() && line.back() == '\r')
			line.remove_suffix(1);
		if (size_t hash = line.find('#'); hash != std::string_view::npos)
			line = line.substr(0, hash);

		LineScanner scan(line, line_no);
		if (scan.at_end())
			continue;
		std::string first = scan.name("net or keyword");
		if (iequals(first, "INPUT") || iequals(first, "OUTPUT")) {
			scan.expect('(');
			std::string net = scan.name("net name");
			scan.expect(')');
			if (!scan.at_end())
				throw ParseError(line_no, "trailing characters after declaration");
			statements.push_back({iequals(first, "INPUT") ? Statement::Kind::Input
								      : Statement::Kind::Output,
					      line_no, net, {}, {}});
			continue;
		}
		scan.expect('=');
		std::string gate = scan.name("gate name");
		scan.expect('(');
		std::vector<std::string> operands;
		operands.push_back(scan.name("operand"));
		while (scan.peek() == ',') {
			scan.expect(',');
			operands.push_back(scan.name("operand"));
		}
		scan.expect(')');
		if (!scan.at_end())
			throw ParseError(line_no, "trailing characters after gate definition");
		statements.push_back({Statement::Kind::Gate, line_no, first, gate, operands});
	}

	Circuit c;
	// first pass: create nodes in file order so ids are dense and stable
	for (const Statement &st : statements) {
		if (st.kind == Statement::Kind::Input) {
			if (c.find(st.target))
				throw ParseError(st.line, "duplicate definition of " + st.target);
			c.add_input(st.target);
		} else if (st.kind == Statement::Kind::Gate) {
			if (is_sequential_name(st.gate_name))
				throw ParseError(st.line, "sequential element " + st.gate_name +
							      " is not supported (combinational netlists only)");
			auto type = gate_type_from_string(st.gate_name);
			if (!type || *type == GateType::Input)
				throw ParseError(st.line, "unknown gate type " + st.gate_name);
			size_t arity = st.operands.size();
			if ((*type == GateType::Not || *type == GateType::Buf) && arity != 1)
				throw ParseError(st.line, st.gate_name + " takes exactly one operand");
			if (*type != GateType::Not && *type != GateType::Buf && arity < 2)
				throw ParseError(st.line, st.gate_name + " takes at least two operands");
			if (c.find(st.target))
				throw ParseError(st.line, "duplicate definition of " + st.target);
			c.add_gate(st.target, *type, std::vector<uint32_t>(arity, 0));
		}
	}
	// second pass: resolve references
	for (const Statement &st : statements) {
		if (st.kind == Statement::Kind::Output) {
			auto id = c.find(st.target);
			if (!id)
				throw ParseError(st.line, "output of undefined net " + st.target);
			c.mark_output(*id);
		} else if (st.kind == Statement::Kind::Gate) {
			uint32_t id = *c.find(st.target);
			std::vector<uint32_t> fanins;
			fanins.reserve(st.operands.size());
			for (const std::string &op : st.operands) {
				auto f = c.find(op);
				if (!f)
					throw ParseError(st.line, "undefined net " + op);
				fanins.push_back(*f);
			}
			c.set_fanins(id, std::move(fanins));
		}
	}

	try {
		c.finalize();
	} catch (const ParseError &) {
		throw;
	} catch (const Error &e) {
		throw ParseError(line_no, e.what());
	}
	return c;
}

Circuit parse_bench_file(const std::filesystem::path &path)
{
	std::ifstream in(path, std::ios::binary);
	if (!in)
		throw Error("cannot open " + path.string());
	std::ostringstream buf;
	buf << in.rdbuf();
	return parse_bench(buf.str());
}

std::string write_bench(const Circuit &c)
{
	std::ostringstream out;
	out << "# " << c.num_inputs() << " inputs, " << c.num_outputs() << " outputs, " << c.num_logic_gates()
	    << " gates\n";
	for (uint32_t id : c.inputs())
		out << "INPUT(" << c.name(id) << ")\n";
	for (uint32_t id : c.outputs())
		out << "OUTPUT(" << c.name(id) << ")\n";
	for (uint32_t id = 0; id < c.size(); ++id) {
		const Gate &g = c.gate(id);
		if (g.type == GateType::Input)
			continue;
		out << c.name(id) << " = " << to_string(g.type) << "(";
		for (size_t k = 0; k < g.fanins.size(); ++k) {
			if (k)
				out << ", ";
			out << c.name(g.fanins[k]);
		}
		out << ")\n";
	}
	return out.str();
}

void write_bench_file(const Circuit &c, const std::filesystem::path &path)
{
	std::ofstream out(path, std::ios::binary);
	if (!out)
		throw Error("cannot open " + path.string() + " for writing");
	out << write_bench(c);
}

} // namespace relock
