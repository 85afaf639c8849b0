from probekit.extract import decode_html, extract_main_text

LONG_PARA = (
    "Regional water authorities approved a ten year maintenance plan for the "
    "aging reservoir network, allocating funds for pipe replacement across "
    "fourteen municipalities and setting quarterly public reporting "
    "requirements for contractors working on the system so residents can "
    "follow progress, costs, and any service interruptions over the full "
    "span of the program with reasonable clarity and advance notice."
)


def test_single_paragraph_inside_nav_chrome():
    html = f"""
    <html><body>
    <nav><a href="/">Home</a> <a href="/a">Archive</a> <a href="/b">About</a></nav>
    <p>{LONG_PARA}</p>
    <footer><a href="/p">Privacy</a> <a href="/t">Terms</a></footer>
    </body></html>
    """
    assert extract_main_text(html) == LONG_PARA


def test_empty_document():
    assert extract_main_text("") == ""
    assert extract_main_text(b"") == ""


def test_hand_labeled_fixture(data_dir):
    html = (data_dir / "html" / "article_with_menu.html").read_bytes()
    expected = (data_dir / "html" / "article_with_menu.expected.txt").read_text().strip()
    assert extract_main_text(html) == expected


def test_script_and_style_invisible():
    html = "<html><body><script>alert('hi')</script><p>" + LONG_PARA + "</p></body></html>"
    out = extract_main_text(html)
    assert "alert" not in out
    assert LONG_PARA in out


def test_link_farm_dropped():
    links = " ".join(f'<a href="/{i}">interesting destination {i}</a>' for i in range(30))
    html = f"<html><body><div>{links}</div><p>{LONG_PARA}</p></body></html>"
    assert extract_main_text(html) == LONG_PARA


def test_undecodable_binary_yields_empty():
    junk = bytes(range(256)) * 4
    assert extract_main_text(junk) == ""


def test_charset_from_content_type_header():
    raw = "<html><body><p>Ценность воды — тема отчёта. ".encode("koi8-r", errors="ignore")
    text = decode_html(raw + b"</p></body></html>", "text/html; charset=koi8-r")
    assert "теме" in text or "тема" in text


def test_charset_from_meta_tag():
    body = "<html><head><meta charset=\"latin-1\"></head><body><p>caf\xe9 économie</p></body></html>"
    raw = body.encode("latin-1")
    assert "café" in decode_html(raw)


def test_charset_fallback_utf8_lossy():
    raw = b"<html><body><p>ok \xff\xfe broken</p></body></html>"
    text = decode_html(raw)
    assert "ok" in text
