"""Result-XML tests: serialisation shape, escaping, in-place insertion."""

from __future__ import annotations

import pytest

from profcat.xmlout import (
    DocResult,
    eurovoc_block,
    insert_result_block,
    result_xml,
    validate_result_xml,
)


class TestSerialise:
    def test_single_doc_exact_bytes(self):
        doc = DocResult("doc-1", (("1542", 0.5), ("4315", 0.125)))
        assert result_xml([doc]) == (
            '<result><EuroVoc documentId="doc-1">'
            '<category code="1542" weight="0.5"></category>'
            '<category code="4315" weight="0.125"></category>'
            "</EuroVoc></result>"
        )

    def test_weights_round_trip_through_repr(self):
        w = 0.17665901837832437
        doc = DocResult("d", (("1542", w),))
        text = result_xml([doc])
        assert f'weight="{w!r}"' in text
        assert float(repr(w)) == w

    def test_blocks_joined_by_newline(self):
        docs = [DocResult("a", (("1", 0.5),)), DocResult("b", (("2", 0.25),))]
        text = result_xml(docs)
        assert "</EuroVoc>\n<EuroVoc" in text
        validate_result_xml(text)

    def test_manual_entries_after_automatic(self):
        doc = DocResult("d", (("1", 0.5),), manual=("9",))
        block = eurovoc_block(doc)
        assert block.index('code="1"') < block.index('code="9"')
        assert '<category code="9" manual="true"></category>' in block
        validate_result_xml(f"<result>{block}</result>")

    def test_attribute_escaping(self):
        doc = DocResult('we&ird<"id>', (('c&d"', 0.5),))
        text = result_xml([doc])
        assert 'documentId="we&amp;ird&lt;&quot;id&gt;"' in text
        assert 'code="c&amp;d&quot;"' in text
        validate_result_xml(text)  # still well-formed

    def test_empty_batch(self):
        assert result_xml([]) == "<result></result>"
        validate_result_xml("<result></result>")


class TestInsert:
    XML = '<?xml version="1.0"?>\n<DOC lang="en">\n<TI>Title</TI>\n</DOC>\n'

    def test_appended_as_last_child(self):
        out = insert_result_block(self.XML, DocResult("d", (("1", 0.5),)))
        assert out.index("<TI>") < out.index("<EuroVoc") < out.index("</DOC>")
        # everything outside the insertion is untouched
        assert out.replace(eurovoc_block(DocResult("d", (("1", 0.5),))), "") == self.XML

    def test_root_found_after_declaration_and_comment(self):
        xml = "<?xml version=\"1.0\"?><!-- c --><root><a/></root>"
        out = insert_result_block(xml, DocResult("d", ()))
        assert out.endswith("<EuroVoc documentId=\"d\"></EuroVoc></root>")

    def test_nested_same_named_elements(self):
        xml = "<doc><doc>inner</doc></doc>"
        out = insert_result_block(xml, DocResult("d", ()))
        assert out == '<doc><doc>inner</doc><EuroVoc documentId="d"></EuroVoc></doc>'

    def test_no_root(self):
        with pytest.raises(ValueError, match="root"):
            insert_result_block("just text", DocResult("d", ()))

    def test_unclosed_root(self):
        with pytest.raises(ValueError, match="closing"):
            insert_result_block("<doc><p>text</p>", DocResult("d", ()))


class TestValidate:
    @pytest.mark.parametrize(
        "text,msg",
        [
            ("<result><oops/></result>", "unexpected element"),
            ("<wrong></wrong>", "root element"),
            ("<result><EuroVoc><category code='1' weight='0.5'/></EuroVoc></result>", "documentId"),
            ("<result><EuroVoc documentId='d'><category weight='0.5'/></EuroVoc></result>", "missing code"),
            ("<result><EuroVoc documentId='d'><category code='1'/></EuroVoc></result>", "missing weight"),
            ("<result><EuroVoc documentId='d'><category code='1' weight='x'/></EuroVoc></result>", "could not convert"),
            ("<result><EuroVoc documentId='d'><category code='1' manual='true' weight='0.5'/></EuroVoc></result>", "manual"),
            ("<result><EuroVoc documentId='d'>", "well-formed"),
        ],
    )
    def test_rejections(self, text, msg):
        with pytest.raises(ValueError, match=msg):
            validate_result_xml(text)
