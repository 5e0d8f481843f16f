import java.util.ArrayList;
import java.util.List;

public class Main {
    static int bonus(int x) {
        return x + 10;
    }
    static List<Integer> boost(List<Integer> xs) {
        List<Integer> out = new ArrayList<>();
        for (int i = 0; i < xs.size(); i++) {
            out.add(bonus(xs.get(i)));
        }
        return out;
    }
    public static void main(String[] args) {
        List<Integer> xs = new ArrayList<>();
        xs.add(1);
        xs.add(2);
        List<Integer> out = boost(xs);
        System.out.println(out.get(0) + "," + out.get(1));
    }
}
