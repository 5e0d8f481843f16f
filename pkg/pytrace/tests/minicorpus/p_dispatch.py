class ExtFile:
    def describe(self):
        return "ext"

class ZipEntry:
    def describe(self):
        return "zip"

def open_entry(kind):
    if kind == "zip":
        return ZipEntry()
    return ExtFile()

def label(entry):
    return entry.describe()

print(label(open_entry("zip")))
print(label(open_entry("ext")))
