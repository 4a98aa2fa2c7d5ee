/// Normalizes a language tag to its lowercase primary subtag, mapping the
/// common three-letter ISO 639 codes to their two-letter forms.
///
/// `"zh-CN"` becomes `"zh"`, `"EN_us"` becomes `"en"`, `"fas"` becomes `"fa"`.
pub fn normalize_lang(code: &str) -> String {
    let primary = code
        .trim()
        .split(['-', '_'])
        .next()
        .unwrap_or_default()
        .to_lowercase();
    let mapped = match primary.as_str() {
        "eng" => "en",
        "zho" | "chi" | "cmn" => "zh",
        "spa" => "es",
        "deu" | "ger" => "de",
        "rus" => "ru",
        "ind" => "id",
        "vie" => "vi",
        "fas" | "per" | "pes" => "fa",
        "ukr" => "uk",
        "swe" => "sv",
        "tha" => "th",
        "jpn" => "ja",
        "ron" | "rum" => "ro",
        "hun" => "hu",
        "bul" => "bg",
        "fra" | "fre" => "fr",
        "fin" => "fi",
        "kor" => "ko",
        "ita" => "it",
        "por" => "pt",
        "urd" => "ur",
        other => other,
    };
    mapped.to_string()
}
