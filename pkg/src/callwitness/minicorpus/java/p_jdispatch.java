class ExtFile {
    String describe() {
        return "ext";
    }
}
class ZipRODirectory extends ExtFile {
    String describe() {
        return "zip";
    }
}
public class Main {
    static ExtFile openEntry(boolean zipped) {
        if (zipped) {
            return new ZipRODirectory();
        }
        return new ExtFile();
    }
    static String label(ExtFile entry) {
        return entry.describe();
    }
    public static void main(String[] args) {
        System.out.println(label(openEntry(true)));
        System.out.println(label(openEntry(false)));
    }
}
