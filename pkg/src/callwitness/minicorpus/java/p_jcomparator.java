import java.util.Arrays;

class LengthComparator {
    public int compare(String a, String b) {
        return a.length() - b.length();
    }
}
public class Main {
    static void sortWords(String[] words) {
        Arrays.sort(words, new LengthComparator());
    }
    public static void main(String[] args) {
        String[] words = {"ccc", "a", "bb"};
        sortWords(words);
        System.out.println(String.join(",", words));
    }
}
