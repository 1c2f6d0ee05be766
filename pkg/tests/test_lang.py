import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loopsight.codegen import ClassLabel, Program, crossover_lines, mutate_program, splice, synthesize_program
from loopsight.lang import (
    PAD_ID,
    UNK_TEXT,
    LexError,
    Token,
    TokenKind,
    TokenVocab,
    VocabError,
    encode,
    load_vocab,
    python_compiles,
    render,
    save_vocab,
    tokenize,
    validate,
)


def kinds_texts(tokens):
    return [(t.kind, t.text) for t in tokens]


class TestLexer:
    def test_assignment(self):
        assert kinds_texts(tokenize("x = 1")) == [
            (TokenKind.IDENTIFIER, "x"),
            (TokenKind.OPERATOR, "="),
            (TokenKind.NUMBER, "1"),
            (TokenKind.NEWLINE, "<NEWLINE>"),
        ]

    def test_import(self):
        assert kinds_texts(tokenize("import math")) == [
            (TokenKind.KEYWORD, "import"),
            (TokenKind.IDENTIFIER, "math"),
            (TokenKind.NEWLINE, "<NEWLINE>"),
        ]

    def test_block_structure(self):
        toks = tokenize("for i in range(3):\n    print(i)\n")
        seq = kinds_texts(toks)
        assert seq[0] == (TokenKind.KEYWORD, "for")
        indent = seq.index((TokenKind.INDENT, "<INDENT>"))
        assert seq[indent + 1] == (TokenKind.IDENTIFIER, "print")
        assert seq[-1] == (TokenKind.DEDENT, "<DEDENT>")

    def test_comments_and_blank_lines_dropped(self):
        assert tokenize("x = 1  # note\n\n# whole line\ny = 2\n") == tokenize("x = 1\ny = 2\n")

    def test_operators_longest_match(self):
        texts = [t.text for t in tokenize("a //= b ** 2 != c")]
        assert texts[:6] == ["a", "//=", "b", "**", "2", "!="]

    def test_strings(self):
        toks = tokenize('print("a b", \'c\')')
        assert [t.text for t in toks if t.kind is TokenKind.STRING] == ['"a b"', "'c'"]

    @pytest.mark.parametrize("src", ['x = "open', "x = 1 $ 2", "x = `y`"])
    def test_errors_carry_position(self, src):
        with pytest.raises(LexError) as info:
            tokenize(src)
        assert info.value.line == 1 and info.value.col >= 1

    def test_bad_dedent(self):
        with pytest.raises(LexError):
            tokenize("if x:\n        y = 1\n    z = 2\n")

    def test_structural_tokens_have_canonical_text(self):
        for tok in tokenize("def f(a):\n    if a:\n        return a\n"):
            assert tok.text
            if tok.kind is TokenKind.INDENT:
                assert tok.text == "<INDENT>"

    def test_render_roundtrip(self):
        rng = random.Random(3)
        for _ in range(30):
            src = synthesize_program(rng.choice(list(ClassLabel)), rng).source
            assert tokenize(render(tokenize(src))) == tokenize(src)


class TestValidate:
    def test_malformed_header(self):
        v = validate("def f(:\n    pass\n")
        assert not v.ok and v.error[0] == 1

    def test_valid_program(self):
        assert validate("import math\ndef f(a):\n    return a + 1\nx = f(2)\n").ok

    def test_verdict_invariant(self):
        from loopsight.lang import CompileVerdict

        with pytest.raises(ValueError):
            CompileVerdict(True, (1, 1, "x"))
        with pytest.raises(ValueError):
            CompileVerdict(False)

    def test_spliced_dedent_below_zero(self):
        a = Program.from_lines(["def f(a):", "    for i in range(3):", "        print(i)", "    return a"], ClassLabel.INDEPENDENT)
        b = Program.from_lines(["x = 1", "y = 2", "print(x)"], ClassLabel.INDEPENDENT)
        # Drop the header so the body lines open the program indented.
        child, _ = splice(a, b, (0, 2), (0, 0))
        assert child.lines[0].startswith("        ")
        assert not validate(child.source).ok
        assert not python_compiles(child.source)

    @pytest.mark.parametrize(
        "src",
        [
            "x = 1\n",
            "def f():\n    pass\n",
            "if x > 1:\n    y = 2\nelse:\n    y = 3\n",
            "for i in range(3):\n    a[i] = i * 2\n",
            "x = [1, 2, 3]\nprint(x[0], 'a')\n",
            "import os\nprint(os.sep)\n",
            "x = 1\n  y = 2\n",
            "for i in range(3)\n    print(i)\n",
            "def f(a, b:\n    return a\n",
            "x = = 2\n",
            "print(1\n",
            "if x:\nprint(1)\n",
            "y = not x and (a or b)\n",
            "x += -3\n",
            "return\n",
        ],
    )
    def test_agrees_with_interpreter_on_fragments(self, src):
        assert validate(src).ok == python_compiles(src)

    def test_agrees_with_interpreter_on_generated_and_spliced(self):
        rng = random.Random(11)
        progs = [synthesize_program(label, rng) for label in ClassLabel for _ in range(100)]
        cases = list(progs)
        for _ in range(150):
            label = rng.choice(list(ClassLabel))
            pool = progs[:100] if label is ClassLabel.AMBIGUOUS else progs[100:]
            a, b = rng.sample(pool, 2)
            c1, c2 = crossover_lines(a, b, rng)
            cases += [c1, mutate_program(c2, rng)]
        verdicts = [(validate(p.source).ok, python_compiles(p.source)) for p in cases]
        assert all(ours == theirs for ours, theirs in verdicts)
        # The sample must exercise both outcomes to mean anything.
        assert {v for v, _ in verdicts} == {True, False}


class TestVocab:
    def test_first_ids(self):
        vocab = TokenVocab()
        ids = encode(tokenize("import math")[:2], vocab)
        assert ids == [1, 2]
        assert vocab.map == {"import": 1, "math": 2}

    def test_idempotent(self):
        vocab = TokenVocab()
        toks = tokenize("x = x + 1\n")
        assert encode(toks, vocab) == encode(toks, vocab)

    def test_frozen_unknown(self):
        vocab = TokenVocab()
        encode(tokenize("x = 1"), vocab)
        vocab.freeze()
        ids = encode([Token(TokenKind.IDENTIFIER, "zeta")], vocab, frozen=True)
        assert ids == [vocab.unk_id]
        assert vocab.map[UNK_TEXT] == vocab.unk_id
        with pytest.raises(VocabError):
            encode(tokenize("y"), vocab)

    def test_pad_never_assigned(self):
        vocab = TokenVocab()
        encode(tokenize("for i in range(3):\n    print(i)\n"), vocab)
        assert PAD_ID not in vocab.map.values()

    def test_roundtrip(self, tmp_path):
        v = TokenVocab({"import": 1})
        save_vocab(v, tmp_path / "v.json")
        back = load_vocab(tmp_path / "v.json")
        assert back == v and back.next_id == 2

    def test_empty(self, tmp_path):
        (tmp_path / "v.json").write_text("{}")
        v = load_vocab(tmp_path / "v.json")
        assert len(v) == 0 and v.next_id == 1

    def test_file_shape(self, tmp_path):
        v = TokenVocab()
        encode(tokenize("import math"), v)
        save_vocab(v, tmp_path / "v.json")
        assert json.loads((tmp_path / "v.json").read_text()) == {"import": 1, "math": 2, "<NEWLINE>": 3}

    @pytest.mark.parametrize(
        "text,key",
        [
            ('{"a": 1, "b": 1}', "b"),
            ('{"a": 1, "a": 2}', "a"),
            ('{"a": 0}', "a"),
            ('{"a": 1.5}', "a"),
            ('{"a": 1, "b": 3}', "b"),
        ],
    )
    def test_malformed_names_key(self, tmp_path, text, key):
        (tmp_path / "v.json").write_text(text)
        with pytest.raises(VocabError, match=repr(key)):
            load_vocab(tmp_path / "v.json")

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.sampled_from(["a", "b", "import", "print", "(", ")", "1", "x1"]), min_size=1, max_size=40))
    def test_injective_and_contiguous(self, texts):
        vocab = TokenVocab()
        ids = encode([Token(TokenKind.IDENTIFIER, t) for t in texts], vocab)
        assert sorted(vocab.map.values()) == list(range(1, len(vocab) + 1))
        for t, i in zip(texts, ids):
            assert vocab.map[t] == i
        assert len(set(ids)) == len(set(texts))
