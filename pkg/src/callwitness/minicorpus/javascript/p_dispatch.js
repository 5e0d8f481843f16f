class ExtFile {
  describe() {
    return "ext";
  }
}
class ZipEntry {
  describe() {
    return "zip";
  }
}
function openEntry(kind) {
  if (kind === "zip") {
    return new ZipEntry();
  }
  return new ExtFile();
}
function label(entry) {
  return entry.describe();
}
console.log(label(openEntry("zip")));
console.log(label(openEntry("ext")));
