package demo.tools;

import java.util.ArrayList;
import java.util.Collections;
import java.util.List;

public class Main {
    static List<Integer> ordered(List<Integer> xs) {
        List<Integer> copy = new ArrayList<>();
        for (int i = 0; i < xs.size(); i++) {
            copy.add(xs.get(i));
        }
        Collections.sort(copy);
        return copy;
    }
    static String render(List<Integer> xs) {
        String text = "";
        for (int i = 0; i < xs.size(); i++) {
            if (i > 0) {
                text = text + "<";
            }
            text = text + xs.get(i);
        }
        return text;
    }
    public static void main(String[] args) {
        List<Integer> xs = new ArrayList<>();
        xs.add(3);
        xs.add(1);
        xs.add(2);
        System.out.println(render(ordered(xs)));
    }
}
